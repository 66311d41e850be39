#pragma once

#include "aztec/tiling.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace aztec {

// Face weights of the order-N diamond and of every reduced diamond below it.
// Level n has n^2 faces; face (p, r) is the 2x2 block centred at
// X = p + r - (n-1), Y = p - r, with edge weights top, right, bottom, left.
// With 2x2-periodic edge weights a face's weights depend only on its level and Y mod 2.
class ShuffleWeights {
public:
    ShuffleWeights(const ModelParams& p, int N);

    int order() const { return N_; }
    const std::array<double, 4>& face(int n, int p, int r) const;

private:
    int N_;
    std::vector<std::array<std::array<double, 4>, 2>> levels_;  // levels_[n-1][Y mod 2]
};

Tiling shuffle_sample(const ModelParams& p, int N, std::uint64_t seed);
Tiling shuffle_sample(const ShuffleWeights& w, std::uint64_t seed);

// Axis-aligned window in the diamond's coordinates; squares count when their centre lies inside.
struct Window {
    double x0, x1, y0, y1;
};

// Fractions of covered squares per domino type, indexed by DominoType.
std::array<double, 4> empirical_density(const Tiling& t, const Window& w);
std::array<double, 4> empirical_density(const Tiling& t);

struct Palette {
    std::string north = "#3a6fc4", east = "#3a6fc4", south = "#f2c12e", west = "#f2c12e";
    std::string stroke = "#202020";
};

std::string render_svg(const Tiling& t, const Palette& pal = {}, double cell = 8.0);

}  // namespace aztec
