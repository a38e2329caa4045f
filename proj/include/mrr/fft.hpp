#pragma once

#include "mrr/types.hpp"

namespace mrr {

/// Centered orthonormal 2D DFT: quadrant swap, forward transform, quadrant
/// swap, scaled by 1/sqrt(H*W). Even dims only. Throws InvalidInputError on
/// non-finite values, ConfigError on odd dims.
ComplexGrid2D fft2c(const ComplexGrid2D &img);

/// Exact inverse of fft2c (also unitary).
ComplexGrid2D ifft2c(const ComplexGrid2D &ksp);

/// Elementwise complex modulus.
Image2D magnitude(const ComplexGrid2D &g);

/// Clamp every value into [0,1].
Image2D clip01(const Image2D &img);

/// Divide every voxel by the volume-wide maximum (negatives clamped to zero
/// first). Throws InvalidInputError when the maximum is not positive.
Volume normalize_volume(const Volume &v);

/// Real image lifted to a complex grid with zero imaginary part.
ComplexGrid2D to_complex(const Image2D &img);

} // namespace mrr
