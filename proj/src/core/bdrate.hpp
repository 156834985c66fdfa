#pragma once

#include <vector>

#include "pipeline.hpp"

namespace lvq {

// Average rate difference of test vs ref in percent over the shared quality
// range (cubic fit of log10(rate) against psnr, integrated analytically).
// Negative means test spends fewer bits at equal quality.
double bd_rate_percent(const std::vector<RdPoint>& ref,
                       const std::vector<RdPoint>& test);

}  // namespace lvq
