#pragma once

#include <vector>

#include "irisbench/random.hpp"
#include "irisbench/templates.hpp"

namespace bench {

inline irisbench::IrisCode random_code(irisbench::Rng& rng, irisbench::CodeLayout layout, double valid = 0.85) {
  irisbench::IrisCode c;
  c.layout = layout;
  c.bits = irisbench::BitVector(layout.bit_count());
  c.mask = irisbench::BitVector(layout.bit_count());
  for (std::size_t i = 0; i < layout.bit_count(); ++i) {
    c.bits.set(i, rng.bernoulli(0.5));
    c.mask.set(i, rng.bernoulli(valid));
  }
  return c;
}

}  // namespace bench
