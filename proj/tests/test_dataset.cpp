#include <doctest.h>

#include <fstream>

#include "mrc/dataset.hpp"
#include "mrc/serde.hpp"
#include "testutil.hpp"

using namespace mrc;

namespace {

std::filesystem::path write_temp(const test::TempDir& dir, const std::string& name,
                                 const std::string& content) {
    auto path = dir.path / name;
    write_file(path, content);
    return path;
}

// A line in the public GSM8K release's shape: rationale text, then the
// final answer after "####".
const char* kGsm8kLine =
    R"({"question": "Natalia sold clips to 48 of her friends in April, and then she sold half as many clips in May. How many clips did Natalia sell altogether in April and May?", "answer": "Natalia sold 48/2 = <<48/2=24>>24 clips in May.\nNatalia sold 48+24 = <<48+24=72>>72 clips altogether in April and May.\n#### 72"})";

}  // namespace

TEST_CASE("gsm8k jsonl loads gold from the final #### marker") {
    test::TempDir dir;
    auto path = write_temp(dir, "g.jsonl", std::string(kGsm8kLine) + "\n");
    Dataset ds = load_dataset(path, DatasetFormat::Gsm8kJsonl, Lang::EN, "gsm8k", "test");
    REQUIRE(ds.problems.size() == 1);
    CHECK(ds.problems[0].gold_answer == make_answer(72));
    CHECK(ds.problems[0].id == "gsm8k#0000");
    CHECK(ds.problems[0].language == Lang::EN);

    SUBCASE("a #### 18 line parses to 18/1") {
        auto p18 = write_temp(dir, "g18.jsonl",
                              R"({"question": "q?", "answer": "work\n#### 18"})" "\n");
        CHECK(load_dataset(p18, DatasetFormat::Gsm8kJsonl, Lang::EN).problems[0].gold_answer ==
              make_answer(18));
    }
}

TEST_CASE("gsm8k jsonl error paths carry line numbers") {
    test::TempDir dir;
    auto empty = write_temp(dir, "empty.jsonl", "");
    CHECK_THROWS_WITH_AS(load_dataset(empty, DatasetFormat::Gsm8kJsonl, Lang::EN),
                         doctest::Contains("no problems"), std::runtime_error);

    auto bad = write_temp(dir, "bad.jsonl", "{not json}\n");
    CHECK_THROWS_WITH_AS(load_dataset(bad, DatasetFormat::Gsm8kJsonl, Lang::EN),
                         doctest::Contains(":1:"), std::runtime_error);

    auto nomark = write_temp(dir, "nomark.jsonl", R"({"question": "q?", "answer": "just text"})" "\n");
    CHECK_THROWS_WITH_AS(load_dataset(nomark, DatasetFormat::Gsm8kJsonl, Lang::EN),
                         doctest::Contains("####"), std::runtime_error);

    auto badgold = write_temp(dir, "badgold.jsonl",
                              R"({"question": "q?", "answer": "#### not-a-number"})" "\n");
    CHECK_THROWS_WITH_AS(load_dataset(badgold, DatasetFormat::Gsm8kJsonl, Lang::EN),
                         doctest::Contains("badgold#0000"), std::runtime_error);
}

TEST_CASE("mgsm tsv loads question and numeric answer columns") {
    test::TempDir dir;
    auto path = write_temp(dir, "es.tsv", "¿Cuántos coches hay en el estacionamiento?\t11\n");
    Dataset ds = load_dataset(path, DatasetFormat::MgsmTsv, Lang::ES, "mgsm");
    REQUIRE(ds.problems.size() == 1);
    CHECK(ds.problems[0].language == Lang::ES);
    CHECK(ds.problems[0].gold_answer == make_answer(11));
    CHECK(ds.problems[0].question == "¿Cuántos coches hay en el estacionamiento?");

    auto three = write_temp(dir, "three.tsv", "q\t1\textra\n");
    CHECK_THROWS_WITH_AS(load_dataset(three, DatasetFormat::MgsmTsv, Lang::ES),
                         doctest::Contains("two columns"), std::runtime_error);
    auto notab = write_temp(dir, "notab.tsv", "only a question\n");
    CHECK_THROWS_AS(load_dataset(notab, DatasetFormat::MgsmTsv, Lang::ES), std::runtime_error);
}

TEST_CASE("dataset loading is deterministic and golds re-normalize") {
    auto path = test::fixtures_dir() / "replay" / "dataset" / "mgsm10_en.tsv";
    Dataset a = load_dataset(path, DatasetFormat::MgsmTsv, Lang::EN, "mgsm10");
    Dataset b = load_dataset(path, DatasetFormat::MgsmTsv, Lang::EN, "mgsm10");
    REQUIRE(a.problems.size() == b.problems.size());
    std::string sa, sb;
    for (size_t i = 0; i < a.problems.size(); ++i) {
        sa += to_jsonl_line(to_json(a.problems[i]));
        sb += to_jsonl_line(to_json(b.problems[i]));
        // The raw string the gold was parsed from normalizes back to it.
        auto renorm = normalize_answer(a.problems[i].gold_answer.raw);
        REQUIRE(renorm.has_value());
        CHECK(*renorm == a.problems[i].gold_answer);
    }
    CHECK(sa == sb);
    CHECK(sha256_hex(sa) == sha256_hex(sb));
}

TEST_CASE("exemplar banks enforce the 4-shot / 2-shot contract") {
    // The bundled banks: 4 exemplars everywhere, 2 for TE.
    for (Lang l : kAllLangs) {
        auto path = test::data_dir() / "banks" / (std::string(to_string(l)) + ".txt");
        ExemplarBank bank = load_exemplar_bank(path, l);
        CHECK(bank.size() == expected_bank_size(l));
        for (const auto& e : bank.exemplars) {
            CHECK_FALSE(e.question.empty());
            CHECK_FALSE(e.solution.empty());
            CHECK(e.language == l);
        }
    }
}

TEST_CASE("exemplar bank loader rejects malformed banks") {
    test::TempDir dir;

    // A TE bank with 4 pairs must fail: TE is 2-shot.
    std::string four_pairs;
    for (int i = 0; i < 4; ++i)
        four_pairs += "Q" + std::to_string(i) + "?\n\nS" + std::to_string(i) + ".\n\n";
    auto te4 = write_temp(dir, "te.txt", four_pairs);
    CHECK_THROWS_WITH_AS(load_exemplar_bank(te4, Lang::TE), doctest::Contains("expected 2"),
                         std::runtime_error);

    // Odd block count (an exemplar whose solution block is empty).
    auto odd = write_temp(dir, "en_odd.txt", "Q0?\n\nS0.\n\nQ1?\n\n\n\nQ2?\n\nS2.\n\nQ3?\n\nS3.\n\n");
    CHECK_THROWS_WITH_AS(load_exemplar_bank(odd, Lang::EN), doctest::Contains("alternating"),
                         std::runtime_error);

    auto empty = write_temp(dir, "en_empty.txt", "\n\n");
    CHECK_THROWS_WITH_AS(load_exemplar_bank(empty, Lang::EN), doctest::Contains("empty"),
                         std::runtime_error);

    // Wrong count for a 4-shot language.
    auto two = write_temp(dir, "en2.txt", "Q0?\n\nS0.\n\nQ1?\n\nS1.\n");
    CHECK_THROWS_WITH_AS(load_exemplar_bank(two, Lang::EN), doctest::Contains("expected 4"),
                         std::runtime_error);
}

TEST_CASE("exemplar records round-trip") {
    PromptExemplar e;
    e.question = "Frage mit Umlauten: wie viele Bäume?";
    e.solution = "21 - 15 = 6. Die Antwort lautet 6.";
    e.language = Lang::DE;
    PromptExemplar back = exemplar_from_json(to_json(e));
    CHECK(back.question == e.question);
    CHECK(back.solution == e.solution);
    CHECK(back.language == e.language);
}

TEST_CASE("problem and trace records round-trip through jsonl") {
    MathProblem p;
    p.id = "x#0001";
    p.question = "¿Cuántos? ৪২";
    p.gold_answer = make_answer(11);
    p.language = Lang::ES;
    MathProblem p2 = problem_from_json(to_json(p));
    CHECK(p2.id == p.id);
    CHECK(p2.question == p.question);
    CHECK(p2.gold_answer == p.gold_answer);
    CHECK(p2.language == p.language);

    SolutionTrace t;
    t.problem_id = "x#0001";
    t.spec = VariationSpec::phrasing(PhrasingSetting::RtSQ, 3);
    t.generations = {"stage one", "stage two"};
    t.extraction_status = ExtractionStatus::Ok;
    t.extracted_answer = make_answer(5, 2, "2.5");
    t.cache_keys = {"aaa", "bbb"};
    SolutionTrace t2 = trace_from_json(to_json(t));
    CHECK(t2.problem_id == t.problem_id);
    CHECK(t2.spec.spec_id() == "cpc:rts_q#s3");
    CHECK(t2.generations == t.generations);
    CHECK(*t2.extracted_answer == *t.extracted_answer);
    CHECK(t2.cache_keys == t.cache_keys);

    // Status/answer invariant enforced on load.
    nlohmann::json bad = to_json(t);
    bad.erase("extracted_answer");
    CHECK_THROWS_AS(trace_from_json(bad), std::invalid_argument);
}

TEST_CASE("variation specs round-trip for every dimension") {
    for (const VariationSpec& spec :
         {VariationSpec::order({2, 0, 3, 1}), VariationSpec::order({0, 1, 2, 3}, 5),
          VariationSpec::phrasing(PhrasingSetting::QPlusRwS), VariationSpec::lang(Lang::TH, 2)}) {
        VariationSpec back = spec_from_json(to_json(spec));
        CHECK(back.spec_id() == spec.spec_id());
        CHECK(back.dimension == spec.dimension);
        CHECK(back.sample == spec.sample);
    }
}
