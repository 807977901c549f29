#include "mrc/report.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <set>

#include "mrc/metrics.hpp"
#include "mrc/serde.hpp"
#include "mrc/types.hpp"

namespace mrc {

namespace {

using json = nlohmann::json;

std::string fmt1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

// Shortest round-trip representation, deterministic across platforms.
std::string fmt_full(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(cells[i]);
    }
    out += "\r\n";
    return out;
}

std::string md_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + c + " |";
    out += "\n";
    return out;
}

std::string md_separator(size_t n) {
    std::string out = "|";
    for (size_t i = 0; i < n; ++i) out += "---|";
    out += "\n";
    return out;
}

const json* dim_of(const RunArtifacts& run, const char* name) {
    if (!run.metrics.contains("dimensions")) return nullptr;
    const auto& dims = run.metrics["dimensions"];
    if (!dims.contains(name)) return nullptr;
    return &dims[name];
}

std::optional<double> variation_accuracy(const json& dim, const std::string& spec_id) {
    const auto& per = dim["per_variation_accuracy"];
    if (!per.contains(spec_id)) return std::nullopt;
    return per[spec_id].get<double>();
}

// The headline accuracy used for the correlation scatter: the vanilla
// single-path accuracy when any dimension carries it, else the best
// available voted accuracy.
double headline_accuracy(const RunArtifacts& run) {
    if (const json* cpc = dim_of(run, "cpc")) {
        if (auto a = variation_accuracy(*cpc, "cpc:vanilla")) return *a;
    }
    if (const json* coc = dim_of(run, "coc")) {
        const auto& ids = (*coc)["spec_ids"];
        if (!ids.empty())
            if (auto a = variation_accuracy(*coc, ids[0].get<std::string>())) return *a;
    }
    if (const json* clc = dim_of(run, "clc")) {
        if (auto a = variation_accuracy(*clc, "clc:en")) return *a;
    }
    if (run.metrics.contains("mrc")) return run.metrics["mrc"]["voted_accuracy"].get<double>();
    return 0.0;
}

std::optional<double> rc_mean(const RunArtifacts& run, const char* name) {
    const json* d = dim_of(run, name);
    if (!d) return std::nullopt;
    return (*d)["rc"]["mean"].get<double>();
}

// Column order of the phrasing table; "RtS Q" sits before "RtS".
const std::vector<std::pair<std::string, std::string>> kCpcColumns = {
    {"cpc:vanilla", "Vanilla CoT"},
    {"cpc:rws", "RwS"},
    {"cpc:q_plus_rws", "Q+RwS"},
    {"cpc:rts_q", "RtS Q"},
    {"cpc:rts", "RtS"},
};

std::vector<std::string> clc_language_codes(const std::vector<RunArtifacts>& runs) {
    std::set<std::string> codes;
    for (const auto& run : runs) {
        if (const json* clc = dim_of(run, "clc"))
            for (const auto& sid : (*clc)["spec_ids"]) {
                std::string s = sid.get<std::string>();
                if (s.rfind("clc:", 0) == 0 && s.find('#') == std::string::npos)
                    codes.insert(s.substr(4));
            }
    }
    return {codes.begin(), codes.end()};  // std::set: alphabetical
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

RunArtifacts load_run_dir(const std::filesystem::path& run_dir) {
    RunArtifacts run;
    auto metrics_path = run_dir / "metrics.json";
    auto manifest_path = run_dir / "manifest.json";
    if (!std::filesystem::exists(metrics_path) || !std::filesystem::exists(manifest_path))
        throw std::runtime_error("incomplete run directory " + run_dir.string() +
                                 ": need metrics.json and manifest.json");
    run.metrics = json::parse(read_file(metrics_path));
    run.manifest = json::parse(read_file(manifest_path));
    run.label = run.metrics.value("model", run_dir.filename().string());
    return run;
}

std::string render_markdown(const std::vector<RunArtifacts>& runs) {
    std::string out;

    // Phrasing settings table.
    if (std::any_of(runs.begin(), runs.end(), [](const auto& r) { return dim_of(r, "cpc"); })) {
        out += "## CPC: accuracy by phrasing setting (%)\n\n";
        std::vector<std::string> header{"run"};
        for (const auto& [_, label] : kCpcColumns) header.push_back(label);
        header.push_back("CPC");
        out += md_row(header) + md_separator(header.size());
        for (const auto& run : runs) {
            const json* cpc = dim_of(run, "cpc");
            if (!cpc) continue;
            std::vector<std::string> row{run.label};
            for (const auto& [sid, _] : kCpcColumns) {
                auto a = variation_accuracy(*cpc, sid);
                row.push_back(a ? fmt1(*a) : "-");
            }
            row.push_back(fmt1((*cpc)["voted_accuracy"].get<double>()));
            out += md_row(row);
        }
        out += "\n";
    }

    // Per-language table.
    auto codes = clc_language_codes(runs);
    if (!codes.empty()) {
        out += "## CLC: accuracy by language (%)\n\n";
        std::vector<std::string> header{"run"};
        for (const auto& c : codes) header.push_back(upper(c));
        header.push_back("CLC");
        out += md_row(header) + md_separator(header.size());
        for (const auto& run : runs) {
            const json* clc = dim_of(run, "clc");
            if (!clc) continue;
            std::vector<std::string> row{run.label};
            for (const auto& c : codes) {
                auto a = variation_accuracy(*clc, "clc:" + c);
                row.push_back(a ? fmt1(*a) : "-");
            }
            row.push_back(fmt1((*clc)["voted_accuracy"].get<double>()));
            out += md_row(row);
        }
        out += "\n";
    }

    // Dimension-vs-joint table.
    if (std::any_of(runs.begin(), runs.end(),
                    [](const auto& r) { return r.metrics.contains("mrc"); })) {
        out += "## MRC: voted accuracy by dimension (%)\n\n";
        std::vector<std::string> header{"run", "COC", "CPC", "CLC", "MRC", "paths"};
        out += md_row(header) + md_separator(header.size());
        for (const auto& run : runs) {
            if (!run.metrics.contains("mrc")) continue;
            const auto& mrc = run.metrics["mrc"];
            std::vector<std::string> row{run.label};
            for (const char* d : {"coc", "cpc", "clc"}) {
                const auto& dv = mrc["dimension_voted"];
                row.push_back(dv.contains(d) ? fmt1(dv[d].get<double>()) : "-");
            }
            row.push_back(fmt1(mrc["voted_accuracy"].get<double>()));
            row.push_back(std::to_string(mrc["paths_per_problem"].get<int>()));
            out += md_row(row);
        }
        out += "\n";
    }

    // Order summary.
    if (std::any_of(runs.begin(), runs.end(), [](const auto& r) {
            const json* coc = dim_of(r, "coc");
            return coc && coc->contains("order_summary");
        })) {
        out += "## COC: exemplar-order summary (%)\n\n";
        std::vector<std::string> header{"run", "MIN", "MEAN", "MAX", "COC"};
        out += md_row(header) + md_separator(header.size());
        for (const auto& run : runs) {
            const json* coc = dim_of(run, "coc");
            if (!coc || !coc->contains("order_summary")) continue;
            const auto& s = (*coc)["order_summary"];
            out += md_row({run.label, fmt1(s["min"].get<double>()), fmt1(s["mean"].get<double>()),
                           fmt1(s["max"].get<double>()), fmt1(s["coc_accuracy"].get<double>())});
        }
        out += "\n";
    }

    // Reasoning-consistency scores.
    out += "## Reasoning consistency (RC)\n\n";
    {
        std::vector<std::string> header{"run", "COC RC", "CPC RC", "CLC RC"};
        out += md_row(header) + md_separator(header.size());
        for (const auto& run : runs) {
            std::vector<std::string> row{run.label};
            for (const char* d : {"coc", "cpc", "clc"}) {
                auto rc = rc_mean(run, d);
                char buf[32];
                if (rc) {
                    std::snprintf(buf, sizeof(buf), "%.3f", *rc);
                    row.push_back(buf);
                } else {
                    row.push_back("-");
                }
            }
            out += md_row(row);
        }
        out += "\n";
    }

    // Accuracy-vs-consistency correlation, when enough runs are on hand.
    if (runs.size() >= 3) {
        std::string section = "## Correlation: accuracy vs. consistency\n\n";
        std::vector<std::string> header{"series", "pearson r", "runs"};
        std::string rows;
        for (const char* d : {"coc", "cpc", "clc"}) {
            std::vector<double> acc, rc;
            for (const auto& run : runs) {
                auto r = rc_mean(run, d);
                if (!r) continue;
                acc.push_back(headline_accuracy(run));
                rc.push_back(*r);
            }
            if (acc.size() < 3) continue;
            try {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.3f", pearson(acc, rc));
                rows += md_row({"accuracy vs " + std::string(d) + " RC", buf,
                                std::to_string(acc.size())});
            } catch (const std::invalid_argument&) {
                rows += md_row({"accuracy vs " + std::string(d) + " RC", "undefined (constant series)",
                                std::to_string(acc.size())});
            }
        }
        if (!rows.empty()) out += section + md_row(header) + md_separator(header.size()) + rows + "\n";
    }

    // Path-scaling series.
    if (std::any_of(runs.begin(), runs.end(),
                    [](const auto& r) { return r.metrics.contains("path_scaling"); })) {
        out += "## Path scaling: voted accuracy vs. number of paths (%)\n\n";
        std::vector<std::string> header{"run", "arm"};
        std::set<int> counts;
        for (const auto& run : runs) {
            if (!run.metrics.contains("path_scaling")) continue;
            for (const auto& p : run.metrics["path_scaling"]["self_consistency"])
                counts.insert(p["paths"].get<int>());
        }
        for (int c : counts) header.push_back("N=" + std::to_string(c));
        header.push_back("greedy");
        out += md_row(header) + md_separator(header.size());
        for (const auto& run : runs) {
            if (!run.metrics.contains("path_scaling")) continue;
            const auto& ps = run.metrics["path_scaling"];
            for (const char* arm : {"self_consistency", "clc"}) {
                std::vector<std::string> row{run.label, arm};
                std::map<int, double> by_n;
                for (const auto& p : ps[arm]) by_n[p["paths"].get<int>()] = p["accuracy"].get<double>();
                for (int c : counts) row.push_back(by_n.count(c) ? fmt1(by_n[c]) : "-");
                row.push_back(fmt1(ps["greedy_accuracy"].get<double>()));
                out += md_row(row);
            }
        }
        out += "\n";
    }

    return out;
}

std::map<std::string, std::string> render_csv(const std::vector<RunArtifacts>& runs) {
    std::map<std::string, std::string> files;

    {
        std::string csv;
        std::vector<std::string> header{"run"};
        for (const auto& [_, label] : kCpcColumns) header.push_back(label);
        header.push_back("CPC");
        csv += csv_row(header);
        for (const auto& run : runs) {
            const json* cpc = dim_of(run, "cpc");
            if (!cpc) continue;
            std::vector<std::string> row{run.label};
            for (const auto& [sid, _] : kCpcColumns) {
                auto a = variation_accuracy(*cpc, sid);
                row.push_back(a ? fmt_full(*a) : "");
            }
            row.push_back(fmt_full((*cpc)["voted_accuracy"].get<double>()));
            csv += csv_row(row);
        }
        files["cpc.csv"] = csv;
    }

    {
        auto codes = clc_language_codes(runs);
        std::string csv;
        std::vector<std::string> header{"run"};
        for (const auto& c : codes) header.push_back(upper(c));
        header.push_back("CLC");
        csv += csv_row(header);
        for (const auto& run : runs) {
            const json* clc = dim_of(run, "clc");
            if (!clc) continue;
            std::vector<std::string> row{run.label};
            for (const auto& c : codes) {
                auto a = variation_accuracy(*clc, "clc:" + c);
                row.push_back(a ? fmt_full(*a) : "");
            }
            row.push_back(fmt_full((*clc)["voted_accuracy"].get<double>()));
            csv += csv_row(row);
        }
        files["clc.csv"] = csv;
    }

    {
        std::string csv = csv_row({"run", "COC", "CPC", "CLC", "MRC", "paths_per_problem"});
        for (const auto& run : runs) {
            if (!run.metrics.contains("mrc")) continue;
            const auto& mrc = run.metrics["mrc"];
            std::vector<std::string> row{run.label};
            for (const char* d : {"coc", "cpc", "clc"}) {
                const auto& dv = mrc["dimension_voted"];
                row.push_back(dv.contains(d) ? fmt_full(dv[d].get<double>()) : "");
            }
            row.push_back(fmt_full(mrc["voted_accuracy"].get<double>()));
            row.push_back(std::to_string(mrc["paths_per_problem"].get<int>()));
            csv += csv_row(row);
        }
        files["mrc.csv"] = csv;
    }

    {
        std::string csv = csv_row({"run", "order_spec", "accuracy", "min", "mean", "max", "coc"});
        for (const auto& run : runs) {
            const json* coc = dim_of(run, "coc");
            if (!coc) continue;
            std::string mn, mean, mx, voted;
            if (coc->contains("order_summary")) {
                const auto& s = (*coc)["order_summary"];
                mn = fmt_full(s["min"].get<double>());
                mean = fmt_full(s["mean"].get<double>());
                mx = fmt_full(s["max"].get<double>());
                voted = fmt_full(s["coc_accuracy"].get<double>());
            }
            for (const auto& sid : (*coc)["spec_ids"]) {
                std::string s = sid.get<std::string>();
                auto a = variation_accuracy(*coc, s);
                csv += csv_row({run.label, s, a ? fmt_full(*a) : "", mn, mean, mx, voted});
            }
        }
        files["orders.csv"] = csv;
    }

    {
        std::string csv = csv_row({"run", "arm", "paths", "accuracy", "greedy_accuracy"});
        for (const auto& run : runs) {
            if (!run.metrics.contains("path_scaling")) continue;
            const auto& ps = run.metrics["path_scaling"];
            std::string greedy = fmt_full(ps["greedy_accuracy"].get<double>());
            for (const char* arm : {"self_consistency", "clc"})
                for (const auto& p : ps[arm])
                    csv += csv_row({run.label, arm, std::to_string(p["paths"].get<int>()),
                                    fmt_full(p["accuracy"].get<double>()), greedy});
        }
        files["scaling.csv"] = csv;
    }

    // Correlation scatter: one row per run, accuracy next to each RC score.
    {
        std::string csv = csv_row({"model", "accuracy", "coc_rc", "cpc_rc", "clc_rc"});
        for (const auto& run : runs) {
            std::vector<std::string> row{run.label, fmt_full(headline_accuracy(run))};
            for (const char* d : {"coc", "cpc", "clc"}) {
                auto rc = rc_mean(run, d);
                row.push_back(rc ? fmt_full(*rc) : "");
            }
            csv += csv_row(row);
        }
        files["correlation.csv"] = csv;
    }

    return files;
}

}  // namespace mrc
