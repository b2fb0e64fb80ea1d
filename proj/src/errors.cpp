#include "cfie/errors.hpp"

namespace cfie {

void throw_invalid(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace cfie
