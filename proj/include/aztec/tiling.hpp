#pragma once

#include "aztec/params.hpp"

#include <string>
#include <utility>
#include <vector>

namespace aztec {

// Named by the position of the black square: W black bottom, E black top,
// S black left, N black right.
enum class DominoType { N, E, S, W };

const char* domino_name(DominoType t);

// Black b(j,k), 0<=j<N, 0<=k<=N, sits at (1/2-N+j+k, -1/2-j+k);
// white w(j,k), 0<=j<=N, 0<=k<N, at (1/2-N+j+k, 1/2-j+k).
struct Domino {
    DominoType type;
    int bj, bk;
    int wj, wk;
};

struct Tiling {
    int N = 0;
    std::vector<Domino> dominoes;
};

// Particle position: column 0..2N and height u.
struct Site {
    int col;
    int u;
    bool operator<(const Site& o) const { return col != o.col ? col < o.col : u < o.u; }
    bool operator==(const Site& o) const { return col == o.col && u == o.u; }
};

std::pair<double, double> black_pos(int N, int j, int k);
std::pair<double, double> white_pos(int N, int j, int k);

// White partner of b(j,k) for a domino of the given type.
std::pair<int, int> partner_white(DominoType t, int j, int k);
bool white_exists(int N, int j, int k);

// Edge weight of the domino with black b(j,k): W a*A, E a, S A, N 1, where
// A = alpha if k - j is even and 1/alpha otherwise.
double domino_weight(const ModelParams& p, DominoType t, int j, int k);
double tiling_weight(const ModelParams& p, const Tiling& t);

bool is_perfect_cover(const Tiling& t);

// Lowest vertex of every path in every column, from the path encoding.
std::vector<Site> tiling_particles(const Tiling& t);

}  // namespace aztec
