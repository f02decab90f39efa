#include "erloss/instance.hpp"

#include <stdexcept>
#include <string>

namespace erloss {

void instance::validate() const {
  if (C < 1) throw std::invalid_argument("instance: C must be >= 1");
  if (classes.empty()) throw std::invalid_argument("instance: at least one class required");
  for (std::size_t j = 0; j < classes.size(); ++j) {
    if (!(classes[j].mu > 0.0))
      throw std::invalid_argument("instance: classes[" + std::to_string(j) + "].mu must be > 0");
    if (!(classes[j].Lambda > 0.0))
      throw std::invalid_argument("instance: classes[" + std::to_string(j) +
                                  "].Lambda must be > 0");
  }
}

}  // namespace erloss
