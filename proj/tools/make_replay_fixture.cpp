// Regenerates the bundled replay fixture: runs the full pipeline against the
// deterministic scripted model in record mode, leaving the response cache
// under fixtures/replay/cache/ for offline replay runs and tests.
//
// Usage: make_replay_fixture [fixture_dir]   (default fixtures/replay)

#include <cstdio>
#include <filesystem>

#include "mrc/orchestrator.hpp"
#include "mrc/scripted_model.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
    fs::path fixture_dir = argc > 1 ? argv[1] : "fixtures/replay";
    try {
        auto config_path = fixture_dir / "config.json";
        mrc::RunConfig cfg = mrc::RunConfig::from_file(config_path);
        cfg.cache_mode = mrc::CacheMode::Record;

        mrc::TemplateSet templates = mrc::TemplateSet::load(cfg.templates_dir, cfg.languages_file);
        std::vector<mrc::MathProblem> known;
        for (const auto& ref : cfg.datasets) {
            mrc::Dataset ds = mrc::load_dataset(ref.path, ref.format, ref.language, ref.name, ref.split);
            for (auto& p : ds.problems) known.push_back(std::move(p));
        }
        auto transport = std::make_shared<mrc::ScriptedModelTransport>(std::move(known), templates);

        fs::path scratch = fixture_dir / ".scratch_run";
        fs::remove_all(scratch);
        fs::remove_all(cfg.cache_dir);

        mrc::Runner runner(cfg, scratch, transport);
        bool ok = runner.execute();
        fs::remove_all(scratch);

        size_t entries = 0;
        for (const auto& e : fs::directory_iterator(cfg.cache_dir))
            if (e.path().extension() == ".json") ++entries;
        std::printf("fixture cache: %zu entries, %d model calls, complete=%s\n", entries,
                    transport->calls(), ok ? "yes" : "no");
        return ok ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fixture generation failed: %s\n", e.what());
        return 1;
    }
}
