#include "aztec/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace aztec {

namespace {

enum Edge { Top, Right, Bottom, Left };
enum Link : std::uint8_t { None, Up, Down, West, East };

// Squares of the order-N diamond by lower-left corner (i, l), -N <= i, l < N.
class Board {
public:
    explicit Board(int N) : N_(N), link_(4 * N * N, None) {}

    Link& at(int i, int l) { return link_[(i + N_) * 2 * N_ + (l + N_)]; }
    Link at(int i, int l) const { return link_[(i + N_) * 2 * N_ + (l + N_)]; }
    void clear() { std::fill(link_.begin(), link_.end(), None); }

    void put(Edge e, int X, int Y) {
        // e is an edge of the face centred at (X, Y)
        switch (e) {
            case Top: at(X - 1, Y) = East, at(X, Y) = West; break;
            case Bottom: at(X - 1, Y - 1) = East, at(X, Y - 1) = West; break;
            case Left: at(X - 1, Y - 1) = Up, at(X - 1, Y) = Down; break;
            case Right: at(X, Y - 1) = Up, at(X, Y) = Down; break;
        }
    }

    bool has(Edge e, int X, int Y) const {
        switch (e) {
            case Top: return at(X - 1, Y) == East;
            case Bottom: return at(X - 1, Y - 1) == East;
            case Left: return at(X - 1, Y - 1) == Up;
            case Right: return at(X, Y - 1) == Up;
        }
        return false;
    }

private:
    int N_;
    std::vector<Link> link_;
};

bool in_diamond(int n, int i, int l) { return std::abs(2 * i + 1) + std::abs(2 * l + 1) <= 2 * n; }

bool is_black(int N, int i, int l) { return ((i + l + 1 + N) % 2 + 2) % 2 == 0; }

// Label (j, k) of a black square, as used by Domino::bj, bk.
std::pair<int, int> black_label(int N, int i, int l) { return {(i - l + N - 1) / 2, (i + l + 1 + N) / 2}; }

DominoType type_towards(Link white_dir) {
    switch (white_dir) {
        case Up: return DominoType::W;
        case Down: return DominoType::E;
        case East: return DominoType::S;
        default: return DominoType::N;
    }
}

double edge_weight(const ModelParams& p, int N, int i0, int l0, int i1, int l1) {
    if (!is_black(N, i0, l0)) std::swap(i0, i1), std::swap(l0, l1);
    Link dir = i1 > i0 ? East : i1 < i0 ? West : l1 > l0 ? Up : Down;
    auto [j, k] = black_label(N, i0, l0);
    return domino_weight(p, type_towards(dir), j, k);
}

bool perfect(const Board& b, int n) {
    for (int i = -n; i < n; ++i)
        for (int l = -n; l < n; ++l) {
            Link s = b.at(i, l);
            bool inside = in_diamond(n, i, l);
            if (!inside) {
                if (s != None) return false;
                continue;
            }
            int pi = i, pl = l;
            Link back = None;
            switch (s) {
                case Up: ++pl, back = Down; break;
                case Down: --pl, back = Up; break;
                case East: ++pi, back = West; break;
                case West: --pi, back = East; break;
                default: return false;
            }
            if (!in_diamond(n, pi, pl) || b.at(pi, pl) != back) return false;
        }
    return true;
}

}  // namespace

ShuffleWeights::ShuffleWeights(const ModelParams& p, int N) : N_(N) {
    p.validate();
    if (N < 1) throw ValidationError("shuffle_sample: N must be >= 1");
    levels_.resize(N);
    // at the top level a face depends only on Y mod 2, and renewal preserves that
    for (int Y = 0; Y < 2; ++Y) {
        int X = N - 1 - Y;
        auto& f = levels_[N - 1][Y];
        f[Top] = edge_weight(p, N, X - 1, Y, X, Y);
        f[Bottom] = edge_weight(p, N, X - 1, Y - 1, X, Y - 1);
        f[Left] = edge_weight(p, N, X - 1, Y - 1, X - 1, Y);
        f[Right] = edge_weight(p, N, X, Y - 1, X, Y);
    }
    for (int n = N; n > 1; --n) {
        const auto& up = levels_[n - 1];
        auto renewed = [&](int Y, Edge e) {
            const auto& f = up[Y & 1];
            return f[e] / (f[Top] * f[Bottom] + f[Left] * f[Right]);
        };
        for (int Y = 0; Y < 2; ++Y) {
            auto& f = levels_[n - 2][Y];
            f[Top] = renewed(Y + 1, Top);
            f[Bottom] = renewed(Y + 1, Bottom);
            f[Left] = renewed(Y, Left);
            f[Right] = renewed(Y, Right);
            for (double w : f)
                if (!(std::isfinite(w) && w > 0.0))
                    throw NumericError("shuffle_sample: face weights left the floating-point range");
        }
    }
}

const std::array<double, 4>& ShuffleWeights::face(int n, int p, int r) const {
    if (n < 1 || n > N_ || p < 0 || p >= n || r < 0 || r >= n) throw ValidationError("ShuffleWeights::face: out of range");
    return levels_[n - 1][(p - r) & 1];
}

Tiling shuffle_sample(const ShuffleWeights& w, std::uint64_t seed) {
    const int N = w.order();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Board prev(N), cur(N);
    for (int n = 1; n <= N; ++n) {
        cur.clear();
        for (int p = 0; p < n; ++p)
            for (int r = 0; r < n; ++r) {
                int X = p + r - (n - 1), Y = p - r;
                bool t = prev.has(Top, X, Y), b = prev.has(Bottom, X, Y);
                bool l = prev.has(Left, X, Y), rt = prev.has(Right, X, Y);
                int cnt = t + b + l + rt;
                if (cnt == 2) continue;
                if (cnt == 1) {
                    Edge e = t ? Bottom : b ? Top : l ? Right : Left;
                    cur.put(e, X, Y);
                    continue;
                }
                const auto& f = w.face(n, p, r);
                double h = f[Top] * f[Bottom];
                if (U(rng) * (h + f[Left] * f[Right]) < h) {
                    cur.put(Top, X, Y);
                    cur.put(Bottom, X, Y);
                } else {
                    cur.put(Left, X, Y);
                    cur.put(Right, X, Y);
                }
            }
#ifndef NDEBUG
        if (!perfect(cur, n)) throw NumericError("shuffle_sample: cover invariant broken");
#endif
        std::swap(prev, cur);
    }
    if (!perfect(prev, N)) throw NumericError("shuffle_sample: cover invariant broken");

    Tiling out;
    out.N = N;
    out.dominoes.reserve(static_cast<std::size_t>(N) * (N + 1));
    for (int i = -N; i < N; ++i)
        for (int l = -N; l < N; ++l) {
            if (!in_diamond(N, i, l) || !is_black(N, i, l)) continue;
            auto [j, k] = black_label(N, i, l);
            DominoType t = type_towards(prev.at(i, l));
            auto [wj, wk] = partner_white(t, j, k);
            out.dominoes.push_back({t, j, k, wj, wk});
        }
    return out;
}

Tiling shuffle_sample(const ModelParams& p, int N, std::uint64_t seed) { return shuffle_sample(ShuffleWeights(p, N), seed); }

std::array<double, 4> empirical_density(const Tiling& t, const Window& win) {
    if (!(win.x0 < win.x1 && win.y0 < win.y1)) throw ValidationError("empirical_density: empty window");
    std::array<double, 4> c{};
    double total = 0.0;
    auto inside = [&](std::pair<double, double> s) {
        return s.first >= win.x0 && s.first <= win.x1 && s.second >= win.y0 && s.second <= win.y1;
    };
    for (const auto& d : t.dominoes) {
        int n = inside(black_pos(t.N, d.bj, d.bk)) + inside(white_pos(t.N, d.wj, d.wk));
        c[static_cast<int>(d.type)] += n;
        total += n;
    }
    if (total == 0.0) throw ValidationError("empirical_density: window contains no squares");
    for (double& x : c) x /= total;
    return c;
}

std::array<double, 4> empirical_density(const Tiling& t) {
    double r = t.N + 1.0;
    return empirical_density(t, {-r, r, -r, r});
}

std::string render_svg(const Tiling& t, const Palette& pal, double cell) {
    const int N = t.N;
    const double size = 2.0 * N * cell;
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    const double sw = std::max(0.1, cell / 16.0);
    char buf[256];
    for (const auto& d : t.dominoes) {
        auto [bx, by] = black_pos(N, d.bj, d.bk);
        auto [wx, wy] = white_pos(N, d.wj, d.wk);
        double x0 = std::min(bx, wx) - 0.5, x1 = std::max(bx, wx) + 0.5;
        double y1 = std::max(by, wy) + 0.5, y0 = std::min(by, wy) - 0.5;
        const std::string* fill = &pal.north;
        switch (d.type) {
            case DominoType::N: fill = &pal.north; break;
            case DominoType::E: fill = &pal.east; break;
            case DominoType::S: fill = &pal.south; break;
            case DominoType::W: fill = &pal.west; break;
        }
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"%s\" stroke=\"%s\" "
                      "stroke-width=\"%g\" data-type=\"%s\"/>\n",
                      (x0 + N) * cell, (N - y1) * cell, (x1 - x0) * cell, (y1 - y0) * cell, fill->c_str(),
                      pal.stroke.c_str(), sw, domino_name(d.type));
        os << buf;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace aztec
