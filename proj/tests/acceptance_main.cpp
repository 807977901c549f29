// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Everything runs offline against bundled data and fixtures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "mrc/dataset.hpp"
#include "mrc/extraction.hpp"
#include "mrc/metrics.hpp"
#include "mrc/orchestrator.hpp"
#include "mrc/prompt.hpp"
#include "mrc/report.hpp"
#include "mrc/serde.hpp"
#include "mrc/templates.hpp"
#include "testutil.hpp"

using namespace mrc;

namespace {

int g_failures = 0;

void report(int index, const char* name, bool pass, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", index, name,
                detail.empty() ? "" : " — ", detail.c_str());
    if (!pass) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- 1 & 2: RC oracle equivalence and vote/RC coherence -------------------

void criterion_rc_oracle_and_vote() {
    std::mt19937_64 rng(2024);
    auto t0 = std::chrono::steady_clock::now();

    int checked = 0;
    bool rc_ok = true, coherence_ok = true, dominance_ok = true;
    for (int i = 0; i < 1000; ++i) {
        int n = 1 + static_cast<int>(rng() % 8);
        SolutionSet set = test::random_solution_set(rng, "p" + std::to_string(i), n, 5, 25);

        double rc = compute_rc({set}).per_problem.begin()->second;
        int oracle = test::brute_force_mode_count(set);
        if (rc != static_cast<double>(oracle) / static_cast<double>(n)) rc_ok = false;

        VoteResult vote = majority_vote(set);
        int successes = 0;
        for (const auto& t : set.traces) successes += t.ok() ? 1 : 0;
        if (successes > 0) {
            if (static_cast<double>(vote.support) / n != rc) coherence_ok = false;
        } else if (vote.winner) {
            coherence_ok = false;
        }

        // Strict-majority dominance under shuffling.
        if (successes > 0 && vote.support * 2 > n) {
            SolutionSet shuffled = set;
            for (size_t k = shuffled.traces.size(); k > 1; --k)
                std::swap(shuffled.traces[k - 1], shuffled.traces[rng() % k]);
            VoteResult v2 = majority_vote(shuffled);
            if (!v2.winner || !(*v2.winner == *vote.winner)) dominance_ok = false;
        }
        ++checked;
    }
    double secs = elapsed_s(t0);
    report(1, "RC matches the brute-force multiset-mode oracle on 1000 random sets",
           rc_ok && secs < 5.0,
           std::to_string(checked) + " sets in " + std::to_string(secs) + "s");
    report(2, "vote/RC coherence and strict-majority dominance on the same corpus",
           coherence_ok && dominance_ok);
}

// ---- 3: path-count bookkeeping ---------------------------------------------

void criterion_path_counts() {
    TemplateSet templates =
        TemplateSet::load(test::data_dir() / "templates", test::data_dir() / "languages.json");
    BankMap banks;
    for (Lang l : kAllLangs)
        banks[l] =
            load_exemplar_bank(test::data_dir() / "banks" / (std::string(to_string(l)) + ".txt"), l);

    std::vector<Lang> langs(kAllLangs.begin(), kAllLangs.end());
    std::vector<Lang> excl = {Lang::BN, Lang::SW, Lang::TE};
    auto specs = compose_mrc_specs(banks, templates, 8, {kAllSettings.begin(), kAllSettings.end()},
                                   langs, excl, 12345);

    std::set<std::string> ids;
    for (const auto& s : specs) ids.insert(s.spec_id());
    bool nineteen = specs.size() == 19 && ids.size() == 19;

    auto orders = gen_order_specs(banks.at(Lang::EN), 24, 1);
    std::set<std::string> order_ids;
    for (const auto& s : orders) order_ids.insert(s.spec_id());
    bool twentyfour = orders.size() == 24 && order_ids.size() == 24;

    report(3, "19 deduplicated joint paths; 24 distinct orders of a 4-shot bank",
           nineteen && twentyfour,
           "paths=" + std::to_string(specs.size()) + ", orders=" + std::to_string(orders.size()));
}

// ---- 4: exemplar-bank contract ---------------------------------------------

void criterion_banks() {
    bool ok = true;
    std::string detail;
    for (Lang l : kAllLangs) {
        auto path = test::data_dir() / "banks" / (std::string(to_string(l)) + ".txt");
        try {
            ExemplarBank bank = load_exemplar_bank(path, l);
            int expected = l == Lang::TE ? 2 : 4;
            if (bank.size() != expected) {
                ok = false;
                detail += std::string(to_string(l)) + " has " + std::to_string(bank.size()) + "; ";
            }
        } catch (const std::exception& e) {
            ok = false;
            detail += std::string(to_string(l)) + ": " + e.what() + "; ";
        }
    }
    // A wrong-size bank must be a load error, not a silent acceptance.
    bool rejects = false;
    try {
        load_exemplar_bank(test::data_dir() / "banks" / "en.txt", Lang::TE);
    } catch (const std::runtime_error&) {
        rejects = true;
    }
    report(4, "bundled banks: 4 exemplars for 10 languages, 2 for TE; violations are load errors",
           ok && rejects, detail);
}

// ---- 5: extraction golden suite --------------------------------------------

void criterion_extraction_goldens() {
    TemplateSet templates =
        TemplateSet::load(test::data_dir() / "templates", test::data_dir() / "languages.json");
    AnchorTable anchors = templates.anchor_table();

    auto records = read_jsonl(test::fixtures_dir() / "extraction_golden.jsonl");
    std::set<std::string> langs;
    int matched = 0, total = 0;
    std::string first_miss;
    for (const auto& r : records) {
        ++total;
        Lang lang = lang_from_string_or_throw(r.at("language").get<std::string>());
        langs.insert(std::string(to_string(lang)));
        auto result = extract_answer(r.at("text").get<std::string>(), lang, anchors);
        std::string expect_status = r.at("status").get<std::string>();
        bool good;
        if (expect_status == "ok") {
            good = result.status == ExtractionStatus::Ok && result.answer &&
                   *result.answer == make_answer(r.at("num").get<std::int64_t>(),
                                                 r.at("den").get<std::int64_t>());
        } else {
            good = result.status == ExtractionStatus::NoNumberFound;
        }
        if (good)
            ++matched;
        else if (first_miss.empty())
            first_miss = r.at("text").get<std::string>().substr(0, 40);
    }
    bool ok = total >= 50 && langs.size() >= 5 && matched == total;
    report(5, "extraction golden suite matches 100%", ok,
           std::to_string(matched) + "/" + std::to_string(total) + " across " +
               std::to_string(langs.size()) + " languages" +
               (first_miss.empty() ? "" : "; first miss: " + first_miss));
}

// ---- 6: end-to-end replay determinism --------------------------------------

void criterion_replay_determinism() {
    auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = RunConfig::from_file(test::fixtures_dir() / "replay" / "config.json");

    auto run_once = [&](const std::filesystem::path& dir) {
        Runner runner(cfg, dir, nullptr);  // replay mode: no transport, no network possible
        if (!runner.execute()) throw std::runtime_error("incomplete replay run");
        RunArtifacts arts = load_run_dir(dir);
        std::string bundle = read_file(dir / "metrics.json");
        bundle += "\x1e" + read_file(dir / "traces.jsonl");
        bundle += "\x1e" + render_markdown({arts});
        for (const auto& [name, content] : render_csv({arts})) bundle += "\x1e" + name + content;
        return bundle;
    };

    test::TempDir tmp;
    bool ok = false;
    std::string detail;
    try {
        std::string first = run_once(tmp.path / "a");
        std::string second = run_once(tmp.path / "b");
        double secs = elapsed_s(t0);
        ok = first == second && secs < 10.0;
        detail = "byte-identical=" + std::string(first == second ? "yes" : "NO") + ", " +
                 std::to_string(secs) + "s, 19 paths x 10 problems";

        auto metrics = nlohmann::json::parse(read_file(tmp.path / "a" / "metrics.json"));
        if (metrics["mrc"]["paths_per_problem"].get<int>() != 19) {
            ok = false;
            detail += ", unexpected path count";
        }
    } catch (const std::exception& e) {
        detail = e.what();
    }
    report(6, "bundled fixture replays offline to byte-identical metrics and reports", ok, detail);
}

// ---- 7: Pearson correctness -------------------------------------------------

void criterion_pearson() {
    std::mt19937_64 rng(77);
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
        size_t n = 2 + rng() % 30;
        std::vector<double> xs(n), ys(n);
        for (size_t i = 0; i < n; ++i) {
            xs[i] = static_cast<double>(rng() % 10000) / 100.0;
            ys[i] = static_cast<double>(rng() % 10000) / 100.0;
        }
        xs[0] += 0.5;  // defeat accidental constants
        ys[n - 1] += 0.5;
        if (n == 2 && xs[0] == xs[1]) xs[0] += 1.0;
        if (n == 2 && ys[0] == ys[1]) ys[0] += 1.0;

        // Textbook two-pass formula, computed independently here.
        double mx = 0, my = 0;
        for (size_t i = 0; i < n; ++i) {
            mx += xs[i];
            my += ys[i];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        double num = 0, dx2 = 0, dy2 = 0;
        for (size_t i = 0; i < n; ++i) {
            num += (xs[i] - mx) * (ys[i] - my);
            dx2 += (xs[i] - mx) * (xs[i] - mx);
            dy2 += (ys[i] - my) * (ys[i] - my);
        }
        if (dx2 == 0 || dy2 == 0) continue;
        double oracle = num / (std::sqrt(dx2) * std::sqrt(dy2));
        double got = pearson(xs, ys);
        if (std::abs(got - oracle) > 1e-12) ok = false;

        // Affine invariance.
        std::vector<double> xs2(n);
        for (size_t i = 0; i < n; ++i) xs2[i] = 2.5 * xs[i] + 17.0;
        if (std::abs(pearson(xs2, ys) - got) > 1e-12) ok = false;
    }
    bool throws = false;
    try {
        pearson({3, 3, 3}, {1, 2, 3});
    } catch (const std::invalid_argument&) {
        throws = true;
    }
    report(7, "Pearson matches the textbook oracle within 1e-12; constant series raise", ok && throws);
}

// ---- 8: voting improves accuracy (mechanism check) --------------------------

void criterion_voting_improves() {
    std::mt19937_64 rng(4242);
    const double p_correct = 0.6;
    const int n_paths = 8, n_problems = 100, n_trials = 200;

    int improved = 0;
    for (int trial = 0; trial < n_trials; ++trial) {
        int voted_correct = 0, single_correct = 0;
        for (int prob = 0; prob < n_problems; ++prob) {
            NumericAnswer gold = make_answer(static_cast<std::int64_t>(rng() % 50) + 1);
            SolutionSet set;
            set.problem_id = "p";
            bool first_path_correct = false;
            for (int path = 0; path < n_paths; ++path) {
                SolutionTrace t;
                t.problem_id = "p";
                t.spec = VariationSpec::lang(kAllLangs[static_cast<size_t>(path) % kAllLangs.size()],
                                             path / static_cast<int>(kAllLangs.size()));
                t.generations.push_back("g");
                t.extraction_status = ExtractionStatus::Ok;
                bool correct = (rng() % 1000) < static_cast<std::uint64_t>(p_correct * 1000);
                if (correct) {
                    t.extracted_answer = gold;
                } else {
                    // Dispersed wrong answers: rarely collide with each other.
                    t.extracted_answer = make_answer(gold.num + 1 + static_cast<std::int64_t>(rng() % 1000));
                }
                if (path == 0) first_path_correct = correct;
                set.traces.push_back(std::move(t));
            }
            VoteResult v = majority_vote(set);
            if (v.winner && *v.winner == gold) ++voted_correct;
            if (first_path_correct) ++single_correct;
        }
        if (voted_correct > single_correct) ++improved;
    }
    double rate = 100.0 * improved / n_trials;
    report(8, "voting over 8 paths beats single-path accuracy in >=95% of 200 trials",
           rate >= 95.0, std::to_string(rate) + "% of trials improved (p=0.6, dispersed errors)");
}

}  // namespace

int main() {
    criterion_rc_oracle_and_vote();
    criterion_path_counts();
    criterion_banks();
    criterion_extraction_goldens();
    criterion_replay_determinism();
    criterion_pearson();
    criterion_voting_improves();
    std::printf("[info] criterion 9: live smoke against a real endpoint is documented in the README "
                "(mrc run --config configs/live_smoke.json) and intentionally not CI-gated\n");
    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
