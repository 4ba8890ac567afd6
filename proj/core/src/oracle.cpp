#include "vsal/oracle.hpp"

#include <cmath>

#include "vsal/error.hpp"

namespace vsal::oracle {

namespace {

struct Setup {
    std::size_t m, n, c;
    std::vector<double> w;  // conditional prior per hypothesis, 0 outside the mask
    std::vector<double> px; // item probability per item, 0 outside the support
};

Setup prepare(const LabelingMatrix& labelings, const Prior& prior, const VersionSpaceMask& mask,
              const ItemDistribution& dist) {
    Setup s{labelings.num_hypotheses(), labelings.num_items(), static_cast<std::size_t>(labelings.num_classes()),
            {}, {}};
    if (s.m > kMaxHypotheses || s.n > kMaxItems) throw InvalidArgument("instance exceeds the oracle's scale limits");
    if (prior.size() != s.m || mask.size() != s.m) throw InvalidArgument("prior or mask size mismatch");
    s.w.assign(s.m, 0.0);
    double z = 0.0;
    for (std::size_t h = 0; h < s.m; ++h) {
        if (mask.bits()[h]) {
            s.w[h] = prior.weights()[h];
            z += s.w[h];
        }
    }
    if (!(z > 0.0)) throw EmptyVersionSpace("oracle needs a version space with positive mass");
    for (auto& v : s.w) v /= z;
    s.px.assign(s.n, 0.0);
    for (const auto& e : dist.entries()) {
        if (e.item >= s.n) throw InvalidArgument("distribution item out of range");
        s.px[e.item] += e.weight;
    }
    return s;
}

double distance(const LabelingMatrix& labelings, const Setup& s, std::size_t a, const std::vector<Label>& f) {
    double d = 0.0;
    for (std::size_t x = 0; x < s.n; ++x) {
        if (labelings.labels()[a * s.n + x] != f[x]) d += s.px[x];
    }
    return d;
}

std::vector<Label> vote_of(const LabelingMatrix& labelings, const Setup& s) {
    std::vector<Label> vote(s.n, 0);
    for (std::size_t x = 0; x < s.n; ++x) {
        std::vector<double> score(s.c, 0.0);
        for (std::size_t h = 0; h < s.m; ++h) {
            if (s.w[h] == 0.0) continue;
            for (std::size_t y = 0; y < s.c; ++y) {
                const double p = labelings.has_soft_probs()
                                     ? (*labelings.soft_probs())[(h * s.n + x) * s.c + y]
                                     : (labelings.labels()[h * s.n + x] == static_cast<Label>(y) ? 1.0 : 0.0);
                score[y] += s.w[h] * p;
            }
        }
        std::size_t best = 0;
        for (std::size_t y = 1; y < s.c; ++y) {
            if (score[y] > score[best]) best = y;
        }
        vote[x] = static_cast<Label>(best);
    }
    return vote;
}

double expected_distance(const LabelingMatrix& labelings, const Setup& s, const std::vector<Label>& f) {
    double total = 0.0;
    for (std::size_t h = 0; h < s.m; ++h) {
        if (s.w[h] != 0.0) total += s.w[h] * distance(labelings, s, h, f);
    }
    return total;
}

} // namespace

BruteMeasures brute_measures(const LabelingMatrix& labelings, const Prior& prior, const VersionSpaceMask& mask,
                             const ItemDistribution& dist, const BayesLabeling* bayes) {
    const Setup s = prepare(labelings, prior, mask, dist);
    const auto& lab = labelings.labels();
    BruteMeasures out;

    for (std::size_t x = 0; x < s.n; ++x) {
        std::vector<double> p(s.c, 0.0);
        for (std::size_t h = 0; h < s.m; ++h) p[static_cast<std::size_t>(lab[h * s.n + x])] += s.w[h];
        double sq = 0.0, top = 0.0;
        for (double v : p) {
            sq += v * v;
            if (v > top) top = v;
        }
        out.gibbs_error.push_back(1.0 - sq);
        out.variation_ratio.push_back(1.0 - top);
    }

    // Ordered pairs, self-pairs included.
    for (std::size_t a = 0; a < s.m; ++a) {
        if (s.w[a] == 0.0) continue;
        for (std::size_t b = 0; b < s.m; ++b) {
            if (s.w[b] == 0.0) continue;
            double d = 0.0;
            for (std::size_t x = 0; x < s.n; ++x) {
                if (lab[a * s.n + x] != lab[b * s.n + x]) d += s.px[x];
            }
            out.pwd += s.w[a] * s.w[b] * d;
        }
    }

    out.vote = vote_of(labelings, s);
    out.gvd = expected_distance(labelings, s, out.vote);

    if (bayes) {
        if (bayes->size() != s.n) throw InvalidArgument("Bayes labeling length mismatch");
        double wa = 0.0;
        for (std::size_t x = 0; x < s.n; ++x) {
            bool all_agree = true, seen = false;
            Label common = 0;
            for (std::size_t h = 0; h < s.m && all_agree; ++h) {
                if (!mask.bits()[h]) continue;
                if (!seen) {
                    common = lab[h * s.n + x];
                    seen = true;
                } else if (lab[h * s.n + x] != common) {
                    all_agree = false;
                }
            }
            if (all_agree && common != (*bayes)[x]) wa += s.px[x];
        }
        out.wrong_agreement = wa;
    }
    return out;
}

VoteOptimality vote_optimality(const LabelingMatrix& labelings, const Prior& prior, const VersionSpaceMask& mask,
                               const ItemDistribution& dist, double tolerance) {
    const Setup s = prepare(labelings, prior, mask, dist);
    if (s.n > 8 || s.c > 3) throw InvalidArgument("vote optimality enumeration needs N <= 8 and C <= 3");
    VoteOptimality out;
    out.vote_distance = expected_distance(labelings, s, vote_of(labelings, s));

    std::size_t total = 1;
    for (std::size_t i = 0; i < s.n; ++i) total *= s.c;
    std::vector<Label> f(s.n, 0);
    out.best_distance = INFINITY;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t rest = code;
        for (std::size_t x = 0; x < s.n; ++x) {
            f[x] = static_cast<Label>(rest % s.c);
            rest /= s.c;
        }
        const double d = expected_distance(labelings, s, f);
        if (d < out.best_distance) {
            out.best_distance = d;
            out.best = f;
        }
    }
    out.optimal = out.vote_distance <= out.best_distance + tolerance;
    return out;
}

} // namespace vsal::oracle
