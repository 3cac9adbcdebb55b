#include "segforge/poisson.hpp"

#include <algorithm>
#include <cmath>

#include "segforge/errors.hpp"

namespace segforge {

namespace {

constexpr std::uint8_t kOutside = 0;
constexpr std::uint8_t kInterior = 1;
constexpr std::uint8_t kBoundary = 2;

// div v at (y,x) from forward-difference fields.
inline double divergence(const PoissonSystem& s, int y, int x, int c) {
  const double vx_here = s.vx[s.value_index(y, x, c)];
  const double vx_left = x > 0 ? s.vx[s.value_index(y, x - 1, c)] : 0.0;
  const double vy_here = s.vy[s.value_index(y, x, c)];
  const double vy_up = y > 0 ? s.vy[s.value_index(y - 1, x, c)] : 0.0;
  return (vx_here - vx_left) + (vy_here - vy_up);
}

}  // namespace

PoissonSystem PoissonSystem::from_images(const ImageBuffer& guide,
                                         const ImageBuffer& target,
                                         const MaskBuffer& region) {
  if (!guide.same_shape(target)) {
    throw DataError("PoissonSystem: guide/target shape mismatch");
  }
  if (guide.height != region.height || guide.width != region.width) {
    throw DataError("PoissonSystem: region shape mismatch");
  }
  PoissonSystem s;
  s.height = guide.height;
  s.width = guide.width;
  s.channels = guide.channels;
  const std::size_t grid = static_cast<std::size_t>(s.height) * s.width;
  s.cell.assign(grid, kOutside);
  s.boundary.assign(grid * s.channels, 0.0);
  s.vx.assign(grid * s.channels, 0.0);
  s.vy.assign(grid * s.channels, 0.0);
  s.init.assign(grid * s.channels, 0.0);

  for (int y = 1; y + 1 < s.height; ++y) {
    for (int x = 1; x + 1 < s.width; ++x) {
      if (region.at(y, x) != 0) s.cell[s.grid_index(y, x)] = kInterior;
    }
  }
  static const int dy[4] = {0, 0, -1, 1};
  static const int dx[4] = {-1, 1, 0, 0};
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (s.cell[s.grid_index(y, x)] != kInterior) continue;
      for (int k = 0; k < 4; ++k) {
        const int ny = y + dy[k], nx = x + dx[k];
        if (s.cell[s.grid_index(ny, nx)] == kOutside) {
          s.cell[s.grid_index(ny, nx)] = kBoundary;
        }
      }
    }
  }
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      for (int c = 0; c < s.channels; ++c) {
        const std::size_t i = s.value_index(y, x, c);
        if (x + 1 < s.width) {
          s.vx[i] = static_cast<double>(guide.at(y, x + 1, c)) - guide.at(y, x, c);
        }
        if (y + 1 < s.height) {
          s.vy[i] = static_cast<double>(guide.at(y + 1, x, c)) - guide.at(y, x, c);
        }
        if (s.cell[s.grid_index(y, x)] == kBoundary) {
          s.boundary[i] = target.at(y, x, c);
        }
        s.init[i] = guide.at(y, x, c);
      }
    }
  }
  return s;
}

bool PoissonSystem::valid(std::string* why) const {
  const std::size_t grid = static_cast<std::size_t>(height) * width;
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3) ||
      cell.size() != grid || boundary.size() != grid * channels ||
      vx.size() != grid * channels || vy.size() != grid * channels) {
    if (why) *why = "bad array sizes";
    return false;
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (cell[grid_index(y, x)] != kInterior) continue;
      if (y == 0 || x == 0 || y + 1 == height || x + 1 == width) {
        if (why) *why = "interior pixel on canvas border";
        return false;
      }
      static const int dy[4] = {0, 0, -1, 1};
      static const int dx[4] = {-1, 1, 0, 0};
      for (int k = 0; k < 4; ++k) {
        if (cell[grid_index(y + dy[k], x + dx[k])] == kOutside) {
          if (why) *why = "interior pixel with outside neighbor";
          return false;
        }
      }
    }
  }
  for (double b : boundary) {
    if (!std::isfinite(b)) {
      if (why) *why = "non-finite boundary value";
      return false;
    }
  }
  return true;
}

PoissonSolution solve_poisson(const PoissonSystem& s,
                              const PoissonOptions& options) {
  std::string why;
  if (!s.valid(&why)) throw DataError("solve_poisson: invalid system: " + why);

  const std::size_t grid = static_cast<std::size_t>(s.height) * s.width;
  PoissonSolution sol;
  sol.values.assign(grid * s.channels, 0.0);

  std::vector<std::size_t> interior;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const std::uint8_t c = s.cell[s.grid_index(y, x)];
      if (c == kInterior) interior.push_back(s.grid_index(y, x));
    }
  }

  // Fixed values and warm start.
  double boundary_mean = 0.0;
  std::size_t boundary_count = 0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (s.cell[s.grid_index(y, x)] != kBoundary) continue;
      ++boundary_count;
      for (int c = 0; c < s.channels; ++c) {
        sol.values[s.value_index(y, x, c)] = s.boundary[s.value_index(y, x, c)];
        boundary_mean += s.boundary[s.value_index(y, x, c)];
      }
    }
  }
  if (boundary_count > 0) {
    boundary_mean /= static_cast<double>(boundary_count * s.channels);
  }
  const bool warm = s.init.size() == sol.values.size();
  for (std::size_t gi : interior) {
    for (int c = 0; c < s.channels; ++c) {
      sol.values[gi * s.channels + c] =
          warm ? s.init[gi * s.channels + c] : boundary_mean;
    }
  }

  if (interior.empty()) {
    sol.converged = true;
    return sol;
  }

  // Precomputed right-hand side div v per interior pixel.
  std::vector<double> rhs(interior.size() * s.channels);
  std::vector<int> ys(interior.size()), xs(interior.size());
  for (std::size_t i = 0; i < interior.size(); ++i) {
    ys[i] = static_cast<int>(interior[i] / s.width);
    xs[i] = static_cast<int>(interior[i] % s.width);
    for (int c = 0; c < s.channels; ++c) {
      rhs[i * s.channels + c] = divergence(s, ys[i], xs[i], c);
    }
  }

  const int w = s.width;
  auto sweep_color = [&](int color) {
    for (std::size_t i = 0; i < interior.size(); ++i) {
      const int y = ys[i], x = xs[i];
      if (((x + y) & 1) != color) continue;
      for (int c = 0; c < s.channels; ++c) {
        const std::size_t base = interior[i] * s.channels;
        const double nb = sol.values[base - s.channels + c] +        // left
                          sol.values[base + s.channels + c] +        // right
                          sol.values[base - static_cast<std::size_t>(w) *
                                                s.channels + c] +    // up
                          sol.values[base + static_cast<std::size_t>(w) *
                                                s.channels + c];     // down
        sol.values[base + c] = (nb - rhs[i * s.channels + c]) / 4.0;
      }
    }
  };

  for (sol.iterations = 0; sol.iterations < options.max_iter;) {
    sweep_color(0);
    sweep_color(1);
    ++sol.iterations;
    sol.residual = max_residual(s, sol.values);
    if (sol.residual <= options.tol) {
      sol.converged = true;
      break;
    }
  }
  if (!sol.converged) sol.residual = max_residual(s, sol.values);
  return sol;
}

double discrete_energy(const PoissonSystem& s,
                       const std::vector<double>& values) {
  double energy = 0.0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const bool here_in = s.cell[s.grid_index(y, x)] == kInterior;
      // right edge
      if (x + 1 < s.width) {
        const bool right_in = s.cell[s.grid_index(y, x + 1)] == kInterior;
        if ((here_in || right_in) &&
            s.cell[s.grid_index(y, x)] != kOutside &&
            s.cell[s.grid_index(y, x + 1)] != kOutside) {
          for (int c = 0; c < s.channels; ++c) {
            const double d = values[s.value_index(y, x + 1, c)] -
                             values[s.value_index(y, x, c)] -
                             s.vx[s.value_index(y, x, c)];
            energy += d * d;
          }
        }
      }
      // down edge
      if (y + 1 < s.height) {
        const bool down_in = s.cell[s.grid_index(y + 1, x)] == kInterior;
        if ((here_in || down_in) &&
            s.cell[s.grid_index(y, x)] != kOutside &&
            s.cell[s.grid_index(y + 1, x)] != kOutside) {
          for (int c = 0; c < s.channels; ++c) {
            const double d = values[s.value_index(y + 1, x, c)] -
                             values[s.value_index(y, x, c)] -
                             s.vy[s.value_index(y, x, c)];
            energy += d * d;
          }
        }
      }
    }
  }
  return energy;
}

double max_residual(const PoissonSystem& s, const std::vector<double>& values) {
  double worst = 0.0;
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      if (s.cell[s.grid_index(y, x)] != kInterior) continue;
      for (int c = 0; c < s.channels; ++c) {
        const double lap = values[s.value_index(y, x - 1, c)] +
                           values[s.value_index(y, x + 1, c)] +
                           values[s.value_index(y - 1, x, c)] +
                           values[s.value_index(y + 1, x, c)] -
                           4.0 * values[s.value_index(y, x, c)];
        worst = std::max(worst, std::abs(lap - divergence(s, y, x, c)));
      }
    }
  }
  return worst;
}

}  // namespace segforge
