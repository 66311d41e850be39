#include "aztec/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace aztec {

void ScaledMat::normalize() {
    double s = max_abs(m);
    if (s > 0.0 && std::isfinite(s)) {
        m /= s;
        log_scale += std::log(s);
    }
}

ScaledMat& ScaledMat::operator*=(const Mat2& rhs) {
    m = m * rhs;
    normalize();
    return *this;
}

ScaledMat& ScaledMat::operator*=(const ScaledMat& rhs) {
    m = m * rhs.m;
    log_scale += rhs.log_scale;
    normalize();
    return *this;
}

ScaledMat ScaledMat::inverse() const {
    ScaledMat r;
    r.m = m.inverse();
    r.log_scale = -log_scale;
    r.normalize();
    return r;
}

Mat2 ScaledMat::value() const { return m * std::exp(log_scale); }

ScaledMat scaled_power(const Mat2& base, int k) {
    ScaledMat acc;
    if (k == 0) return acc;
    ScaledMat b;
    b.m = k > 0 ? base : Mat2(base.inverse());
    b.normalize();
    unsigned e = static_cast<unsigned>(k > 0 ? k : -k);
    while (e) {
        if (e & 1u) acc *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return acc;
}

Mat2 mat_pow(const Mat2& base, int k) { return scaled_power(base, k).value(); }

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("AZTEC_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f) {
    unsigned nt = std::min<std::size_t>(worker_count(), n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    f(i);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

Poly poly_mul(const Poly& p, const Poly& q) {
    if (p.empty() || q.empty()) return {};
    Poly r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    return r;
}

Poly poly_add(const Poly& p, const Poly& q) {
    Poly r(std::max(p.size(), q.size()), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) r[i] += p[i];
    for (std::size_t i = 0; i < q.size(); ++i) r[i] += q[i];
    return r;
}

Poly poly_scale(const Poly& p, double s) {
    Poly r(p);
    for (auto& c : r) c *= s;
    return r;
}

Poly poly_deflate(const Poly& p, double r, double* rem) {
    if (p.size() < 2) {
        if (rem) *rem = p.empty() ? 0.0 : p[0];
        return {};
    }
    std::size_t n = p.size() - 1;
    Poly q(n, 0.0);
    double carry = p[n];
    for (std::size_t k = n; k-- > 0;) {
        q[k] = carry;
        carry = p[k] + carry * r;
    }
    if (rem) *rem = carry;
    return q;
}

double poly_eval(const Poly& p, double x) {
    double s = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) s = s * x + p[k];
    return s;
}

cplx poly_eval(const Poly& p, cplx x) {
    cplx s = 0.0;
    for (std::size_t k = p.size(); k-- > 0;) s = s * x + p[k];
    return s;
}

std::vector<cplx> poly_roots(const Poly& p) {
    std::size_t n = p.size();
    while (n > 0 && p[n - 1] == 0.0) --n;
    if (n < 2) return {};
    std::size_t deg = n - 1;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
    for (std::size_t i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < deg; ++i) C(i, deg - 1) = -p[i] / p[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("companion eigensolver failed");
    std::vector<cplx> r(deg);
    for (std::size_t i = 0; i < deg; ++i) r[i] = es.eigenvalues()[i];
    return r;
}

}  // namespace aztec
