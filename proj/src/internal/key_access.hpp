#pragma once

#include "ibrs/scheme.hpp"

namespace ibrs {

struct KeyAccess {
  static const Bytes& bytes(const SymmetricKey& k) { return k.bytes_; }
};

}  // namespace ibrs
