#include "freelab/errors.hpp"

namespace freelab {

SizeLimitError::SizeLimitError(const std::string& what, std::size_t requested,
                               std::size_t cap)
    : Error(what + ": size " + std::to_string(requested) + " exceeds cap " +
            std::to_string(cap)),
      requested_(requested),
      cap_(cap) {}

}  // namespace freelab
