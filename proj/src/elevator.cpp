#include "qmr/elevator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qmr/errors.hpp"

namespace qmr {

namespace {

cplx as_complex(const Vec& v) { return cplx(v[0], v[1]); }

Vec rotate(const Vec& p, double angle) {
    const cplx z = as_complex(p) * std::polar(1.0, angle);
    return {z.real(), z.imag()};
}

std::size_t nearest_at(const std::vector<Vec>& sample, std::size_t p, double target, double tol,
                       std::size_t exclude) {
    std::size_t best = sample.size();
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sample.size(); ++i) {
        if (i == p || i == exclude) continue;
        const double g = std::abs(chordal(sample[i], sample[p]) - target);
        if (g < gap) {
            gap = g;
            best = i;
        }
    }
    if (best == sample.size() || gap > tol)
        throw ResolutionError("no sample point within r/8 of distance " + std::to_string(target) +
                              " from p");
    return best;
}

double triple_separation(const GroupActionModel& model, const Mobius& g, const Vec& a, const Vec& b,
                         const Vec& c) {
    const Vec ga = boundary_image(model, g, a), gb = boundary_image(model, g, b),
              gc = boundary_image(model, g, c);
    return std::min({chordal(ga, gb), chordal(ga, gc), chordal(gb, gc)});
}

}  // namespace

std::vector<Vec> elevator_sample(const Vec& p, double r, double L, std::size_t global_count,
                                 std::uint64_t seed) {
    if (p.size() != 2 || std::abs(norm(p) - 1.0) > 1e-12) throw DomainError("p must be a point of S^1");
    if (!(r > 0.0 && r <= 2.0)) throw ParameterError("r must lie in (0, diam]");
    std::vector<Vec> out{p};
    auto add = [&](const Vec& v) {
        for (const auto& w : out)
            if (chordal(v, w) < 1e-13) return;
        out.push_back(v);
    };
    auto at_distance = [&](double delta) {
        if (!(delta > 0.0 && delta < 2.0)) return;
        const double angle = 2.0 * std::asin(delta / 2.0);
        add(rotate(p, angle));
        add(rotate(p, -angle));
    };
    at_distance(r / 2);
    at_distance(r / 4);
    for (int j = -12;; ++j) {
        const double delta = r * std::pow(2.0, j / 2.0);
        if (delta >= 2.0) break;
        at_distance(delta);
    }
    at_distance(L * r);
    Rng rng(seed);
    for (std::size_t i = 0; i < global_count; ++i) {
        const double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
        add({std::cos(t), std::sin(t)});
    }
    return out;
}

void certify_elevator(const GroupActionModel& model, const std::vector<Vec>& sample,
                      std::size_t p_index, ElevatorCertificate& cert) {
    const std::size_t n = sample.size();
    std::vector<Vec> img;
    img.reserve(n);
    for (const auto& x : sample) img.push_back(boundary_image(model, cert.g, x));
    std::vector<double> dp(n);
    for (std::size_t i = 0; i < n; ++i) dp[i] = chordal(sample[i], sample[p_index]);
    const double r = cert.r;
    // One elevator constant serves (i)-(iii) and (ii) already forces it to be >= 1.
    cert.C_i = cert.C_ii = 1.0;
    cert.c_iii = std::numeric_limits<double>::infinity();
    cert.far_diameter = 0.0;
    cert.far_empty = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (dp[i] >= cert.L * r) cert.far_empty = false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = chordal(sample[i], sample[j]);
            const double e = chordal(img[i], img[j]);
            cert.C_i = std::max({cert.C_i, r * d / e, r * e / d});
            if (dp[i] < r && dp[j] < r) cert.C_ii = std::max({cert.C_ii, e * r / d, d / (r * e)});
            const bool ij = dp[i] < r / 2 && dp[j] >= r;
            const bool ji = dp[j] < r / 2 && dp[i] >= r;
            if (ij || ji) cert.c_iii = std::min(cert.c_iii, e);
            if (dp[i] >= cert.L * r && dp[j] >= cert.L * r) cert.far_diameter = std::max(cert.far_diameter, e);
        }
    }
    cert.omega_iv = cert.L * cert.far_diameter;
}

ElevatorCertificate conformal_elevator(const GroupActionModel& model, const std::vector<Vec>& sample,
                                       std::size_t p_index, double r, double L,
                                       std::size_t word_budget) {
    if (model.kind != ModelKind::h2_disk) throw ConfigError("the elevator is implemented for H^2 models");
    if (!(L >= 2.0)) throw ParameterError("L must be at least 2");
    if (!(r > 0.0 && r <= 2.0)) throw ParameterError("r must lie in (0, diam]");
    if (p_index >= sample.size()) throw ShapeError("p index out of range");
    ElevatorCertificate cert;
    cert.p = sample[p_index];
    cert.r = r;
    cert.L = L;
    cert.sample_size = sample.size();
    cert.x2 = nearest_at(sample, p_index, r / 2, r / 8, sample.size());
    cert.x3 = nearest_at(sample, p_index, r / 4, r / 8, cert.x2);
    cert.d12 = chordal(sample[cert.x2], sample[p_index]);
    cert.d13 = chordal(sample[cert.x3], sample[p_index]);

    // Points on the ray from 0 towards p whose shadows have size ~ r, moved
    // back near the base point by greedy generator descent.
    auto descend = [&](double depth) {
        const cplx q = std::tanh(depth / 2.0) * as_complex(cert.p);
        Mobius h = Mobius::identity();
        double best = h2_distance(*h.apply(model.base_disk), q);
        for (int it = 0; it < 100000; ++it) {
            Mobius step = h;
            double step_d = best;
            for (const auto& s : model.generators) {
                const Mobius c = (h * s).canonical();
                const double d = h2_distance(*c.apply(model.base_disk), q);
                if (d < step_d - 1e-12) {
                    step_d = d;
                    step = c;
                }
            }
            if (step_d >= best) break;
            best = step_d;
            h = step;
        }
        return h;
    };
    std::vector<Mobius> starts;
    for (double scale : {2.0, 4.0, 8.0}) {
        const Mobius h = descend(std::max(0.0, std::log(scale / r)));
        bool seen = false;
        for (const auto& s : starts) seen = seen || matrix_distance(s, h) < 1e-9;
        if (!seen) starts.push_back(h);
    }

    // Keep the candidate with the tightest certificate. Triple separation
    // alone leaves |g'| on B(p, r) loose by a factor of 30 or so.
    const Vec& x1 = sample[p_index];
    std::vector<std::pair<Mobius, double>> pool;
    auto consider = [&](const Mobius& g) {
        pool.emplace_back(g, triple_separation(model, g, x1, sample[cert.x2], sample[cert.x3]));
        ++cert.candidates;
    };
    consider(Mobius::identity());
    const auto ball = word_ball(model, word_budget);
    for (const auto& h : starts)
        for (const auto& w : ball) consider((h * w).canonical().inverse());
    double best_score = std::numeric_limits<double>::infinity();
    for (const auto& [g, sep] : pool) {
        ElevatorCertificate trial = cert;
        trial.g = g;
        certify_elevator(model, sample, p_index, trial);
        const double score = std::max({trial.C_i, trial.C_ii, 1.0 / trial.c_iii, trial.omega_iv});
        if (score < best_score) {
            best_score = score;
            cert.g = g;
            cert.separation = sep;
        }
    }
    certify_elevator(model, sample, p_index, cert);
    return cert;
}

}  // namespace qmr
