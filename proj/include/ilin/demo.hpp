#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ilin/histories.hpp"

namespace ilin {

/// fig3, fig4, validity, validity_abort, lemma1, theorem1.
const std::vector<std::string>& demo_names();

/// Histories the demos run, by name: fig3, fig4, validity, validity_bad,
/// validity_abort, alpha1, alpha2, alpha3, scons_alpha1, scons_alpha2.
Execution demo_history(std::string_view name);
const std::vector<std::string>& demo_history_names();

/// Runs a demo, printing expected and actual results. Returns whether all
/// expectations held. Throws UnknownDemo.
bool run_demo(std::string_view name, std::ostream& out);

}  // namespace ilin
