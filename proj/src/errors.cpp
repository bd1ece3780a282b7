#include "estc/errors.hpp"

#include <sstream>

namespace estc {

namespace {
std::string transversality_message(const std::string& key, double value) {
  std::ostringstream os;
  os << "transversality violated: " << key << " must vanish (got " << value
     << ")";
  return os.str();
}
}  // namespace

TransversalityViolation::TransversalityViolation(char amplitude, int j, int k,
                                                 double value)
    : ValidationError(
          transversality_message(amplitude + std::to_string(j) + std::to_string(k), value),
          amplitude + std::to_string(j) + std::to_string(k)),
      j_(j),
      k_(k) {}

StageSingular::StageSingular(std::size_t stage, std::string site, double rcond)
    : Error("stage " + std::to_string(stage) + " at site " + site +
            " is singular (rcond " + std::to_string(rcond) + ")"),
      stage_(stage),
      rcond_(rcond) {}

}  // namespace estc
