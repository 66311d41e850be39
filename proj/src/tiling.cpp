#include "aztec/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace aztec {

const char* domino_name(DominoType t) {
    switch (t) {
        case DominoType::N: return "N";
        case DominoType::E: return "E";
        case DominoType::S: return "S";
        case DominoType::W: return "W";
    }
    return "?";
}

std::pair<double, double> black_pos(int N, int j, int k) { return {0.5 - N + j + k, -0.5 - j + k}; }

std::pair<double, double> white_pos(int N, int j, int k) { return {0.5 - N + j + k, 0.5 - j + k}; }

std::pair<int, int> partner_white(DominoType t, int j, int k) {
    switch (t) {
        case DominoType::W: return {j, k};
        case DominoType::E: return {j + 1, k - 1};
        case DominoType::S: return {j + 1, k};
        case DominoType::N: return {j, k - 1};
    }
    return {j, k};
}

bool white_exists(int N, int j, int k) { return j >= 0 && j <= N && k >= 0 && k < N; }

double domino_weight(const ModelParams& p, DominoType t, int j, int k) {
    double A = ((k - j) % 2 == 0) ? p.alpha : 1.0 / p.alpha;
    switch (t) {
        case DominoType::W: return p.a * A;
        case DominoType::E: return p.a;
        case DominoType::S: return A;
        case DominoType::N: return 1.0;
    }
    return 0.0;
}

double tiling_weight(const ModelParams& p, const Tiling& t) {
    double w = 1.0;
    for (const auto& d : t.dominoes) w *= domino_weight(p, d.type, d.bj, d.bk);
    return w;
}

bool is_perfect_cover(const Tiling& t) {
    int N = t.N;
    if (static_cast<int>(t.dominoes.size()) != N * (N + 1)) return false;
    std::set<std::pair<int, int>> bs, ws;
    for (const auto& d : t.dominoes) {
        if (d.bj < 0 || d.bj >= N || d.bk < 0 || d.bk > N) return false;
        if (!white_exists(N, d.wj, d.wk)) return false;
        if (partner_white(d.type, d.bj, d.bk) != std::pair{d.wj, d.wk}) return false;
        if (!bs.insert({d.bj, d.bk}).second || !ws.insert({d.wj, d.wk}).second) return false;
    }
    return true;
}

std::vector<Site> tiling_particles(const Tiling& t) {
    const int N = t.N;
    // path nodes live on the left edge of black squares, in doubled coordinates
    auto key = [](double x, double y) {
        return std::pair<long, long>{std::lround(2 * x), std::lround(2 * y)};
    };
    std::map<std::pair<long, long>, const Domino*> by_node;
    for (const auto& d : t.dominoes) {
        auto [x, y] = black_pos(N, d.bj, d.bk);
        by_node[key(x - 0.5, y)] = &d;
    }
    auto to_site = [N](double x, double y) {
        return Site{static_cast<int>(std::lround(x + N + y + 0.5)), static_cast<int>(std::lround(y + 0.5))};
    };
    std::set<Site> out;
    for (int j = 0; j < N; ++j) {
        auto [bx, by] = black_pos(N, j, 0);
        double x = bx - 0.5, y = by;
        std::vector<Site> nodes{to_site(x, y)};
        for (int guard = 0; guard < 4 * N + 4; ++guard) {
            auto it = by_node.find(key(x, y));
            if (it == by_node.end() || it->second->type == DominoType::N) break;
            auto [wx, wy] = white_pos(N, it->second->wj, it->second->wk);
            x = wx + 0.5;
            y = wy;
            nodes.push_back(to_site(x, y));
        }
        std::vector<Site> path;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            path.push_back(nodes[i]);
            if (i + 1 < nodes.size() && nodes[i + 1].col == nodes[i].col + 2)
                path.push_back({nodes[i].col + 1, nodes[i + 1].u});
        }
        Site last = path.back();
        for (int c = last.col + 1; c <= 2 * N; ++c) path.push_back({c, last.u});
        std::map<int, int> low;
        for (const auto& s : path) {
            auto it = low.find(s.col);
            if (it == low.end() || s.u < it->second) low[s.col] = s.u;
        }
        for (auto [c, u] : low) out.insert({c, u});
    }
    return {out.begin(), out.end()};
}

}  // namespace aztec
