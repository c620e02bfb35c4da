#ifndef DYNASTRIDE_IMAGE_HPP
#define DYNASTRIDE_IMAGE_HPP

#include <vector>

#include "dynastride/types.hpp"

namespace dynastride {

// Raster kernels. Each has a serial reference implementation and an
// OpenMP-parallel variant; both produce bit-identical output and the
// serial one is kept as the oracle for the parallel path.

// Bilinear resample to out_h x out_w (pixel-center alignment). Channel
// count is preserved. A same-size resize is an exact copy.
Frame resize_bilinear_serial(const Frame& src, int out_h, int out_w);
Frame resize_bilinear(const Frame& src, int out_h, int out_w);

// Left-to-right concatenation into one raster. All frames must share
// height and channel count; rows are copied without resampling.
Frame hconcat_serial(const std::vector<Frame>& frames);
Frame hconcat_frames(const std::vector<Frame>& frames);

}  // namespace dynastride

#endif  // DYNASTRIDE_IMAGE_HPP
