#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "ppp/coupling.hpp"

namespace ppp {

namespace {

constexpr double kMerge = 1e-12;
constexpr double kSnap = 1e-9;
constexpr double kSkip = 1e-15;

// Particles by position; each position keeps its mass per source index.
struct Site {
    double total = 0.0;
    std::map<std::size_t, double> parts;
};
using Cloud = std::map<double, Site>;

Cloud::iterator key_near(Cloud& cloud, double x) {
    auto it = cloud.lower_bound(x - kMerge);
    if (it != cloud.end() && it->first <= x + kMerge) return it;
    return cloud.emplace(x, Site{}).first;
}

void deposit(Cloud& cloud, double x, std::size_t src, double mass) {
    if (mass <= 0.0) return;
    auto& site = key_near(cloud, x)->second;
    site.total += mass;
    site.parts[src] += mass;
}

} // namespace

std::vector<double> TransportPlan::row_sums() const {
    std::vector<double> r(source.size(), 0.0);
    for (const auto& e : entries) r[e.source] += e.mass;
    return r;
}

std::vector<double> TransportPlan::col_sums() const {
    std::vector<double> c(dest.size(), 0.0);
    for (const auto& e : entries) c[e.dest] += e.mass;
    return c;
}

std::vector<double> TransportPlan::row_means() const {
    std::vector<double> num(source.size(), 0.0);
    const auto r = row_sums();
    for (const auto& e : entries) num[e.source] += e.mass * dest.x[e.dest];
    for (std::size_t i = 0; i < num.size(); ++i) num[i] = r[i] > 0.0 ? num[i] / r[i] : source.x[i];
    return num;
}

double TransportPlan::max_marginal_error() const {
    double worst = 0.0;
    const auto r = row_sums();
    const auto c = col_sums();
    for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - source.w[i]));
    for (std::size_t j = 0; j < c.size(); ++j) worst = std::max(worst, std::abs(c[j] - dest.w[j]));
    return worst;
}

double TransportPlan::max_mean_error() const {
    double worst = 0.0;
    const auto m = row_means();
    for (std::size_t i = 0; i < m.size(); ++i) worst = std::max(worst, std::abs(m[i] - source.x[i]));
    return worst;
}

TransportPlan martingale_transport(const DiscreteMeasure& source, const DiscreteMeasure& dest) {
    if (source.x.empty() || dest.x.empty()) {
        throw std::invalid_argument("martingale_transport: empty measure");
    }
    if (std::abs(source.total() - dest.total()) > 1e-9) {
        throw std::invalid_argument("martingale_transport: total masses differ");
    }
    const auto dom = dominates_cx(idf_of(source), idf_of(dest), 1e-12);
    if (!dom.holds) {
        throw ConvexOrderError("martingale_transport: source is not below dest in convex order",
                               dom.witness.value_or(0.0), dom.max_violation);
    }

    Cloud cloud;
    for (std::size_t i = 0; i < source.size(); ++i) deposit(cloud, source.x[i], i, source.w[i]);

    // phi_dest at its atoms and the cumulative mass through each.
    const std::size_t n = dest.size();
    std::vector<double> dcum(n);
    std::vector<double> dphi(n, 0.0);
    double cum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j > 0) dphi[j] = dphi[j - 1] + cum * (dest.x[j] - dest.x[j - 1]);
        cum += dest.w[j];
        dcum[j] = cum;
    }

    std::vector<double> xs;
    std::vector<double> fs;
    std::vector<double> ph;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double s = dcum[j];
        const double d = dest.x[j];
        auto line = [&](double x) { return dphi[j] + s * (x - d); };

        xs.clear();
        fs.clear();
        ph.clear();
        double f = 0.0;
        double phi = 0.0;
        for (const auto& [x, site] : cloud) {
            if (!xs.empty()) phi += f * (x - xs.back());
            f += site.total;
            xs.push_back(x);
            fs.push_back(f);
            ph.push_back(phi);
        }
        const std::size_t k = xs.size();
        auto g = [&](std::size_t i) { return line(xs[i]) - ph[i]; };

        // g is concave and peaks at the first particle where F reaches s.
        std::size_t top = 0;
        while (top + 1 < k && fs[top] < s - 1e-15) ++top;
        if (g(top) <= kSkip) continue;

        double a;
        std::size_t i = top;
        while (i > 0 && g(i - 1) > 0.0) --i;
        if (i == 0) {
            a = d - dphi[j] / s;
        } else {
            // On (x_{i-1}, x_i), g has slope s - F(x_{i-1}) > 0.
            a = xs[i - 1] + (-g(i - 1)) / (s - fs[i - 1]);
        }
        double b;
        std::size_t r = top;
        while (r + 1 < k && g(r + 1) > 0.0) ++r;
        // On (x_r, x_{r+1}) or beyond the last particle, g has slope s - F(x_r) < 0.
        b = xs[r] + g(r) / (fs[r] - s);
        if (!(b > a)) continue;

        std::vector<std::pair<std::size_t, double>> to_a;
        std::vector<std::pair<std::size_t, double>> to_b;
        auto it = cloud.upper_bound(a + kMerge);
        while (it != cloud.end() && it->first < b - kMerge) {
            const double z = it->first;
            const double wa = (b - z) / (b - a);
            for (const auto& [src, mass] : it->second.parts) {
                to_a.emplace_back(src, mass * wa);
                to_b.emplace_back(src, mass * (1.0 - wa));
            }
            it = cloud.erase(it);
        }
        for (const auto& [src, mass] : to_a) deposit(cloud, a, src, mass);
        for (const auto& [src, mass] : to_b) deposit(cloud, b, src, mass);
    }

    TransportPlan plan;
    plan.source = source;
    plan.dest = dest;
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const auto& [x, site] : cloud) {
        auto hit = std::lower_bound(dest.x.begin(), dest.x.end(), x);
        std::size_t jd;
        if (hit == dest.x.end()) {
            jd = n - 1;
        } else if (hit == dest.x.begin()) {
            jd = 0;
        } else {
            jd = static_cast<std::size_t>(hit - dest.x.begin());
            if (x - dest.x[jd - 1] < dest.x[jd] - x) --jd;
        }
        if (std::abs(dest.x[jd] - x) > kSnap) {
            throw std::runtime_error("martingale_transport: mass left off the destination support");
        }
        for (const auto& [src, mass] : site.parts) acc[{src, jd}] += mass;
    }
    for (const auto& [key, mass] : acc) plan.entries.push_back({key.first, key.second, mass});

    if (plan.max_marginal_error() > 1e-9 || plan.max_mean_error() > 1e-8) {
        throw std::runtime_error("martingale_transport: plan failed its marginal or mean check");
    }
    return plan;
}

} // namespace ppp
