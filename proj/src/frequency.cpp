#include <algorithm>
#include <stdexcept>

#include "ppp/models.hpp"
#include "ppp/parallel.hpp"

namespace ppp {

FrequencyRun frequency_run(const GenerativeModel& model, std::size_t n, const RngStream& rng) {
    if (n == 0) throw std::invalid_argument("frequency_run: n must be >= 1");
    FrequencyRun run;
    run.model_id = model.id();
    run.seed = rng.seed();
    run.stream = rng.stream_id();
    run.n = n;
    run.values.resize(n);
    const std::size_t blocks = (n + kReplicateBlock - 1) / kReplicateBlock;
    for_each_block(blocks, [&](std::size_t b) {
        RngStream r = rng.split(b);
        const std::size_t end = std::min(n, (b + 1) * kReplicateBlock);
        for (std::size_t i = b * kReplicateBlock; i < end; ++i) {
            const double theta = model.sample_theta(r);
            const Observation d = model.sample_data(theta, r);
            run.values[i] = model.exact_ppp(d);
        }
    });
    return run;
}

double tail_probability(const EmpiricalSample& sample, double x) {
    return sample.cdf(x + kTieTolerance);
}

RunSummary summarize(const EmpiricalSample& sample) {
    RunSummary s;
    s.n = sample.size();
    s.mean = sample.mean();
    s.variance = sample.variance();
    s.tail_alphas = {0.01, 0.05, 0.1, 0.25};
    for (double a : s.tail_alphas) s.tail_probs.push_back(tail_probability(sample, a));
    constexpr int kGrid = 512;
    for (int i = 0; i < kGrid; ++i) {
        const double x = static_cast<double>(i) / (kGrid - 1);
        s.ecdf_grid.push_back(x);
        s.ecdf_values.push_back(sample.cdf(x));
    }

    // phi_emp(x) = F x - S on each gap between order statistics, where F is
    // the fraction and S the scaled sum of values <= x. The gap to x^2 / 2 is
    // concave there and peaks at x = F.
    const auto v = sample.values();
    const double n = static_cast<double>(v.size());
    auto excess_at = [](double x, double f, double sum) { return f * x - sum - 0.5 * x * x; };
    double worst = -0.5;
    double f = 0.0;
    double sum = 0.0;
    std::size_t i = 0;
    double left = 0.0;
    while (true) {
        const double right = i < v.size() ? std::min(1.0, std::max(0.0, v[i])) : 1.0;
        const double a = std::max(0.0, left);
        const double b = std::max(a, right);
        worst = std::max({worst, excess_at(a, f, sum), excess_at(b, f, sum)});
        if (f > a && f < b) worst = std::max(worst, excess_at(f, f, sum));
        if (i >= v.size()) break;
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) {
            sum += v[j] / n;
            ++j;
        }
        f = static_cast<double>(j) / n;
        left = right;
        i = j;
    }
    s.max_idf_excess = worst;
    return s;
}

} // namespace ppp
