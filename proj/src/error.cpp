#include "ilin/error.hpp"

namespace ilin {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedEvent: return "MalformedEvent";
    case ErrorKind::NotWellFormed: return "NotWellFormed";
    case ErrorKind::NoPendingMatch: return "NoPendingMatch";
    case ErrorKind::IllegalInput: return "IllegalInput";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::UnknownObject: return "UnknownObject";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::InvalidTask: return "InvalidTask";
    case ErrorKind::NotOneShot: return "NotOneShot";
    case ErrorKind::NotTotal: return "NotTotal";
    case ErrorKind::NotLinearizable: return "NotLinearizable";
    case ErrorKind::NoResponseFound: return "NoResponseFound";
    case ErrorKind::IllegalProcess: return "IllegalProcess";
    case ErrorKind::UnknownDemo: return "UnknownDemo";
    case ErrorKind::Io: return "Io";
  }
  return "Error";
}

}  // namespace ilin
