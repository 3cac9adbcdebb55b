#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "segforge/image.hpp"

namespace segforge {

struct PoissonOptions {
  double tol = 1e-3;     // max |laplacian(g) - div v| over the region, 8-bit scale
  int max_iter = 10000;  // red-black Gauss-Seidel sweeps
};

// Discrete gradient-domain blending problem on a pixel grid.
// cell: 0 outside, 1 interior (unknown), 2 boundary (fixed value).
// Guidance is a forward-difference field: vx(y,x) ~ I(y,x+1)-I(y,x),
// vy(y,x) ~ I(y+1,x)-I(y,x); its divergence is the Poisson right-hand side.
struct PoissonSystem {
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<std::uint8_t> cell;   // height*width
  std::vector<double> boundary;     // height*width*channels, valid at cell==2
  std::vector<double> vx;           // height*width*channels
  std::vector<double> vy;
  std::vector<double> init;         // optional warm start, height*width*channels

  std::size_t grid_index(int y, int x) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  std::size_t value_index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }

  // Interior = region pixels whose 4 neighbors are all on the canvas;
  // boundary = neighbors of the interior outside it, valued from target;
  // guidance = forward differences of guide; warm start from guide.
  static PoissonSystem from_images(const ImageBuffer& guide,
                                   const ImageBuffer& target,
                                   const MaskBuffer& region);

  // Every interior pixel must have its 4 neighbors inside interior+boundary.
  bool valid(std::string* why = nullptr) const;
};

struct PoissonSolution {
  // Full-grid values: solved interior, fixed boundary, zero outside.
  std::vector<double> values;  // height*width*channels
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Red-black Gauss-Seidel on laplacian(g) = div v with Dirichlet boundary.
// Throws DataError on an invalid system; non-convergence is reported in the
// result, not thrown, so callers can inspect the residual.
PoissonSolution solve_poisson(const PoissonSystem& system,
                              const PoissonOptions& options = {});

// Gradient-mismatch energy E(g) = sum over edges touching the interior of
// (g(b) - g(a) - v_ab)^2. Gauss-Seidel sweeps never increase it.
double discrete_energy(const PoissonSystem& system,
                       const std::vector<double>& values);

// max over interior of |laplacian(g) - div v|.
double max_residual(const PoissonSystem& system,
                    const std::vector<double>& values);

}  // namespace segforge
