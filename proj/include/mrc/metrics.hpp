#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrc/answer.hpp"
#include "mrc/types.hpp"

namespace mrc {

// Per-problem and mean reasoning-consistency scores: the size of the largest
// equal-answer group over the total path count n. Failed extractions stay in
// the denominator but join no group; a problem with zero successful
// extractions scores 0.
struct RCScore {
    std::map<std::string, double> per_problem;
    double mean = 0.0;
    int n = 0;  // paths per problem, identical across the run
};

// Majority-vote outcome for one problem. `winner` is absent when every
// extraction failed; such problems count as incorrect. Ties are broken by
// the earliest supporting trace in canonical spec order (traces ordered by
// spec_id), with the tie surfaced for audit.
struct VoteResult {
    std::string problem_id;
    std::optional<NumericAnswer> winner;
    int support = 0;
    bool tie = false;
    std::vector<NumericAnswer> tie_set;
};

RCScore compute_rc(const std::vector<SolutionSet>& sets, double tolerance = 0.0);

VoteResult majority_vote(const SolutionSet& set, double tolerance = 0.0);

// Percent of problems whose voted answer equals gold exactly (or within the
// configured tolerance). Gold map must cover every vote's problem id.
double accuracy(const std::vector<VoteResult>& votes, const std::map<std::string, NumericAnswer>& gold,
                double tolerance = 0.0);

// Single-variation accuracy straight from traces (one trace per problem).
double accuracy(const std::vector<SolutionTrace>& traces, const std::map<std::string, NumericAnswer>& gold,
                double tolerance = 0.0);

// Sample Pearson correlation coefficient. Throws std::invalid_argument for
// series shorter than 2 or with zero variance (undefined correlation).
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

struct OrderSummary {
    double min = 0.0;
    double mean = 0.0;
    double max = 0.0;
    double coc_accuracy = 0.0;  // voted accuracy across the orders
};

// Min/mean/max of the per-order accuracies next to the voted accuracy.
// Requires at least 2 orders.
OrderSummary summarize_orders(const std::vector<double>& per_order_accuracies, double voted_accuracy);

}  // namespace mrc
