#include "mrc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mrc {

namespace {

struct AnswerGroup {
    NumericAnswer representative;
    int count = 0;
};

// Groups the successfully extracted answers of `traces`, visiting traces in
// canonical spec order (sorted by spec_id). Groups come out ordered by their
// first supporting trace, which is what the vote tie-break keys on.
std::vector<AnswerGroup> group_answers(const std::vector<SolutionTrace>& traces, double tolerance) {
    std::vector<const SolutionTrace*> ordered;
    ordered.reserve(traces.size());
    for (const auto& t : traces) ordered.push_back(&t);
    std::sort(ordered.begin(), ordered.end(), [](const SolutionTrace* a, const SolutionTrace* b) {
        return a->spec.spec_id() < b->spec.spec_id();
    });

    std::vector<AnswerGroup> groups;
    for (const SolutionTrace* t : ordered) {
        if (!t->ok()) continue;
        const NumericAnswer& a = *t->extracted_answer;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const AnswerGroup& g) {
            return answers_equal(g.representative, a, tolerance);
        });
        if (it == groups.end())
            groups.push_back({a, 1});
        else
            ++it->count;
    }
    return groups;
}

int max_group_count(const std::vector<AnswerGroup>& groups) {
    int best = 0;
    for (const auto& g : groups) best = std::max(best, g.count);
    return best;
}

}  // namespace

RCScore compute_rc(const std::vector<SolutionSet>& sets, double tolerance) {
    if (sets.empty()) throw std::invalid_argument("compute_rc: no solution sets");
    RCScore score;
    score.n = sets.front().n();
    double sum = 0.0;
    for (const auto& set : sets) {
        set.validate();
        if (set.n() != score.n)
            throw std::invalid_argument("compute_rc: heterogeneous path count n (" +
                                        std::to_string(set.n()) + " vs " + std::to_string(score.n) + ")");
        auto groups = group_answers(set.traces, tolerance);
        double rc = static_cast<double>(max_group_count(groups)) / static_cast<double>(score.n);
        score.per_problem[set.problem_id] = rc;
        sum += rc;
    }
    score.mean = sum / static_cast<double>(sets.size());
    return score;
}

VoteResult majority_vote(const SolutionSet& set, double tolerance) {
    set.validate();
    VoteResult result;
    result.problem_id = set.problem_id;

    auto groups = group_answers(set.traces, tolerance);
    if (groups.empty()) return result;  // all extractions failed: no winner, counted wrong

    int best = max_group_count(groups);
    for (const auto& g : groups)
        if (g.count == best) result.tie_set.push_back(g.representative);
    // Groups are ordered by first supporting trace in canonical spec order,
    // so the first group at max support is the deterministic winner.
    result.winner = result.tie_set.front();
    result.support = best;
    result.tie = result.tie_set.size() > 1;
    if (!result.tie) result.tie_set.clear();
    return result;
}

double accuracy(const std::vector<VoteResult>& votes, const std::map<std::string, NumericAnswer>& gold,
                double tolerance) {
    if (votes.empty()) throw std::invalid_argument("accuracy: no votes");
    int correct = 0;
    for (const auto& v : votes) {
        auto it = gold.find(v.problem_id);
        if (it == gold.end()) throw std::invalid_argument("accuracy: no gold answer for " + v.problem_id);
        if (v.winner && answers_equal(*v.winner, it->second, tolerance)) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(votes.size());
}

double accuracy(const std::vector<SolutionTrace>& traces, const std::map<std::string, NumericAnswer>& gold,
                double tolerance) {
    if (traces.empty()) throw std::invalid_argument("accuracy: no traces");
    int correct = 0;
    for (const auto& t : traces) {
        auto it = gold.find(t.problem_id);
        if (it == gold.end()) throw std::invalid_argument("accuracy: no gold answer for " + t.problem_id);
        if (t.ok() && answers_equal(*t.extracted_answer, it->second, tolerance)) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(traces.size());
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("pearson: length mismatch");
    const size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("pearson: need at least 2 points");
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: correlation undefined for a constant series");
    return sxy / std::sqrt(sxx * syy);
}

OrderSummary summarize_orders(const std::vector<double>& per_order_accuracies, double voted_accuracy) {
    if (per_order_accuracies.size() < 2)
        throw std::invalid_argument("summarize_orders: need at least 2 orders");
    OrderSummary s;
    s.min = *std::min_element(per_order_accuracies.begin(), per_order_accuracies.end());
    s.max = *std::max_element(per_order_accuracies.begin(), per_order_accuracies.end());
    s.mean = std::accumulate(per_order_accuracies.begin(), per_order_accuracies.end(), 0.0) /
             static_cast<double>(per_order_accuracies.size());
    s.coc_accuracy = voted_accuracy;
    return s;
}

}  // namespace mrc
