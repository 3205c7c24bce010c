#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fcms/errors.hpp"
#include "fcms/io.hpp"

using namespace fcms;
using namespace fcms::io;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("fcms_io_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("default config carries the baseline") {
    const RunConfig cfg;
    CHECK(cfg.beta == 0.5);
    CHECK(cfg.gamma == 0.1);
    CHECK(cfg.eta == 0.01);
    CHECK(cfg.noise_sigma == 0.0);
    const auto params = to_model_params(cfg);
    CHECK(critical_beta(params) == doctest::Approx(1.58114).epsilon(1e-5));
}

TEST_CASE("apply_key_value layering and rejection") {
    RunConfig cfg;
    apply_key_value(cfg, "beta", "1.65");
    CHECK(cfg.beta == 1.65);  // supercritical values are a run-time concern
    CHECK_NOTHROW(validate_config(cfg));

    apply_key_value(cfg, "t-max", "500");
    CHECK(cfg.t_max == 500);

    try {
        apply_key_value(cfg, "betaa", "1");
        FAIL("expected throw");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "betaa");
    }
    CHECK_THROWS_AS(apply_key_value(cfg, "beta", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_key_value(cfg, "t-max", "12x"), ConfigError);
}

TEST_CASE("validate_config names the field and its bound") {
    RunConfig cfg;
    cfg.gamma = 1.5;
    try {
        validate_config(cfg);
        FAIL("expected throw");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "gamma");
        const std::string msg = e.what();
        CHECK(msg.find("gamma") != std::string::npos);
        CHECK(msg.find("0 < gamma < 1") != std::string::npos);
    }

    RunConfig bad_kind;
    bad_kind.kind = "quantum";
    CHECK_THROWS_AS(validate_config(bad_kind), ConfigError);

    RunConfig bad_format;
    bad_format.format = "xml";
    CHECK_THROWS_AS(validate_config(bad_format), ConfigError);
}

TEST_CASE("config files: comments, layering, malformed lines, unknown keys") {
    const auto dir = temp_dir("config");
    const fs::path good = dir / "good.conf";
    {
        std::ofstream out(good);
        out << "# comment line\n"
            << "beta = 1.55   # trailing comment\n"
            << "\n"
            << "t-max = 12345\n";
    }
    RunConfig cfg;
    apply_config_file(cfg, good);
    CHECK(cfg.beta == 1.55);
    CHECK(cfg.t_max == 12345);
    // a later flag-style override wins
    apply_key_value(cfg, "beta", "0.5");
    CHECK(cfg.beta == 0.5);

    const fs::path malformed = dir / "malformed.conf";
    {
        std::ofstream out(malformed);
        out << "beta 1.5\n";
    }
    RunConfig cfg2;
    CHECK_THROWS_AS(apply_config_file(cfg2, malformed), ConfigError);

    const fs::path unknown = dir / "unknown.conf";
    {
        std::ofstream out(unknown);
        out << "betta = 1.5\n";
    }
    RunConfig cfg3;
    CHECK_THROWS_AS(apply_config_file(cfg3, unknown), ConfigError);

    RunConfig cfg4;
    CHECK_THROWS_AS(apply_config_file(cfg4, dir / "missing.conf"), ConfigError);
}

TEST_CASE("list parsing") {
    const auto betas = parse_double_list("0.5, 1.41,1.55 ,1.65", "betas");
    REQUIRE(betas.size() == 4);
    CHECK(betas[1] == 1.41);
    const auto sizes = parse_size_list("100,1000", "n-list");
    REQUIRE(sizes.size() == 2);
    CHECK(sizes[1] == 1000);
    CHECK_THROWS_AS(parse_double_list("", "betas"), ConfigError);
    CHECK_THROWS_AS(parse_double_list("1.0,x", "betas"), ConfigError);
}

TEST_CASE("format_double renders round-trip-exact values") {
    const double values[] = {0.1, 1.0 / 3.0, 2.0, -6.203873246325319e-41, 1e308};
    for (const double v : values) {
        const std::string text = format_double(v);
        CHECK(std::strtod(text.c_str(), nullptr) == v);
    }
}

TEST_CASE("emit_csv: schema, final newline, empty table, round-trip") {
    const auto dir = temp_dir("csv");

    const auto traj = simulate(ModelKind::Reduced, ReducedState{1.0, 2.0},
                               ModelParams::baseline(), 5);
    const auto table = trajectory_table(traj);
    const fs::path path = dir / "traj.csv";
    emit_csv(table, path);
    const std::string text = slurp(path);
    CHECK(text.rfind("t,S,d,G1,G2,L_global\n", 0) == 0);
    CHECK(text.back() == '\n');

    // parse back and compare values exactly
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    std::size_t t = 0;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        CHECK(std::strtoull(cell.c_str(), nullptr, 10) == t);
        std::getline(row, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == traj.s[t]);
        std::getline(row, cell, ',');
        CHECK(std::strtod(cell.c_str(), nullptr) == traj.d[t]);
        ++t;
    }
    CHECK(t == traj.size());

    // EWS schema
    EwsReport report;
    report.points.push_back(EwsPoint{0.5, 1e-3, 0.95, 21.2, 16.0, 1000, 10});
    const fs::path ews_path = dir / "ews.csv";
    emit_csv(ews_table(report), ews_path);
    CHECK(slurp(ews_path).rfind("beta,variance,lag1_ac,tau_theory,tau_measured\n", 0) ==
          0);

    // empty record set: header only
    CsvTable empty;
    empty.columns = {"a", "b"};
    const fs::path empty_path = dir / "empty.csv";
    emit_csv(empty, empty_path);
    CHECK(slurp(empty_path) == "a,b\n");
}

TEST_CASE("emit_json: sorted keys, metadata embedding, determinism") {
    const auto dir = temp_dir("json");
    RunConfig cfg;
    cfg.command = "eigen";
    cfg.out_dir = (dir / "out").string();
    const auto meta = make_metadata(cfg);

    const auto report = spectral_report(to_model_params(cfg));
    const fs::path a = dir / "a.json";
    const fs::path b = dir / "b.json";
    emit_json(spectral_report_body(report), meta, a);
    emit_json(spectral_report_body(report), meta, b);
    CHECK(slurp(a) == slurp(b));  // byte-identical

    const auto parsed = nlohmann::json::parse(slurp(a));
    REQUIRE(parsed.contains("metadata"));
    REQUIRE(parsed.contains("report"));
    const auto& rep = parsed["report"];
    const std::vector<std::string> expected_keys = {"beta_c", "criterion_satisfied",
                                                    "eigenvalues", "rho", "stable",
                                                    "tau_theory"};
    std::vector<std::string> keys;
    for (auto it = rep.begin(); it != rep.end(); ++it) keys.push_back(it.key());
    CHECK(keys == expected_keys);  // nlohmann iterates in sorted order
    CHECK(rep["rho"].get<double>() == doctest::Approx(0.95394).epsilon(1e-5));
    CHECK(rep["beta_c"].get<double>() == doctest::Approx(1.58114).epsilon(1e-5));
    CHECK(rep["stable"].get<bool>());
    CHECK(parsed["metadata"]["tool_version"].is_string());
    CHECK(parsed["metadata"]["config"]["gamma"].is_string());
}

TEST_CASE("run: eigen writes the spectral report and metadata") {
    const auto dir = temp_dir("run_eigen");
    RunConfig cfg;
    cfg.command = "eigen";
    cfg.out_dir = (dir / "out").string();
    CHECK(run(cfg) == kExitOk);
    const auto parsed = nlohmann::json::parse(slurp(dir / "out" / "spectral.json"));
    CHECK(parsed["report"]["rho"].get<double>() == doctest::Approx(0.95394).epsilon(1e-5));
    CHECK(fs::exists(dir / "out" / "run_metadata.json"));
    const auto meta = nlohmann::json::parse(slurp(dir / "out" / "run_metadata.json"));
    CHECK(meta["duration_seconds"].is_number());
    CHECK(meta["outputs"][0] == "spectral.json");
}

TEST_CASE("run: simulate decays, writes CSV, reruns byte-identically") {
    const auto dir = temp_dir("run_sim");
    RunConfig cfg;
    cfg.command = "simulate";
    cfg.kind = "reduced";
    cfg.d0 = 2.0;
    cfg.s0 = 0.0;
    cfg.t_max = 2000;
    cfg.out_dir = (dir / "out").string();
    CHECK(run(cfg) == kExitOk);
    const std::string first = slurp(dir / "out" / "trajectory.csv");

    // final |d| <= 1e-12: last row, third column
    const auto last_line_start = first.rfind('\n', first.size() - 2);
    std::stringstream row(first.substr(last_line_start + 1));
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    CHECK(std::abs(std::strtod(cell.c_str(), nullptr)) <= 1e-12);

    CHECK(run(cfg) == kExitOk);
    CHECK(slurp(dir / "out" / "trajectory.csv") == first);
}

TEST_CASE("run: divergence exit taxonomy") {
    const auto dir = temp_dir("run_div");

    // a diverging plain simulation reports exit code 4 with files written
    RunConfig sim;
    sim.command = "simulate";
    sim.beta = 1.65;
    sim.d0 = 2.0;
    sim.t_max = 10000;
    sim.out_dir = (dir / "sim").string();
    CHECK(run(sim) == kExitDivergence);
    CHECK(fs::exists(dir / "sim" / "trajectory.csv"));

    // divergence inside a sweep is data: exit 0
    RunConfig sweep;
    sweep.command = "sweep";
    sweep.betas = "0.5,1.65";
    sweep.t_max = 10000;
    sweep.out_dir = (dir / "sweep").string();
    CHECK(run(sweep) == kExitOk);

    // config errors surface as ConfigError (the CLI maps them to exit 2)
    RunConfig bad;
    bad.command = "eigen";
    bad.gamma = 1.5;
    bad.out_dir = (dir / "bad").string();
    CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("run: scale writes variances and the fitted slope") {
    const auto dir = temp_dir("run_scale");
    RunConfig cfg;
    cfg.command = "scale";
    cfg.n_list = "64,128";
    cfg.scale_mode = "noisy";
    cfg.t_max = 300;
    cfg.burn_in = 0;
    cfg.replicates = 4;
    cfg.format = "json";
    cfg.out_dir = (dir / "out").string();
    CHECK(run(cfg) == kExitOk);
    const auto parsed = nlohmann::json::parse(slurp(dir / "out" / "scale.json"));
    CHECK(parsed["report"]["points"].size() == 2);
    CHECK(parsed["report"]["slope"].is_number());
}

TEST_CASE("run: remaining subcommands smoke") {
    const auto dir = temp_dir("run_rest");

    RunConfig ews;
    ews.command = "ews";
    ews.betas = "0.5";
    ews.noise_sigma = 0.01;
    ews.t_max = 5000;
    ews.burn_in = 500;
    ews.out_dir = (dir / "ews").string();
    CHECK(run(ews) == kExitOk);
    CHECK(fs::exists(dir / "ews" / "ews.csv"));

    RunConfig ablate;
    ablate.command = "ablate";
    ablate.variant = "persistence";
    ablate.s0 = 0.0;
    ablate.s0_alt = 7.0;
    ablate.d0 = 2.0;
    ablate.t_max = 100;
    ablate.out_dir = (dir / "ablate").string();
    CHECK(run(ablate) == kExitOk);
    CHECK(fs::exists(dir / "ablate" / "ablate_persistence.csv"));
    const auto extra =
        nlohmann::json::parse(slurp(dir / "ablate" / "ablate_result.json"));
    CHECK(extra["report"]["insensitive_from"].get<int>() == 1);

    RunConfig inv;
    inv.command = "invariance";
    inv.samples = 64;
    inv.t_max = 3000;
    inv.out_dir = (dir / "inv").string();
    CHECK(run(inv) == kExitOk);
    const auto inv_json = nlohmann::json::parse(slurp(dir / "inv" / "invariance.json"));
    CHECK(inv_json["report"]["absorbed_fraction"].get<double>() == 1.0);

    RunConfig phase;
    phase.command = "phase";
    phase.kind = "saturated";
    phase.grid_n = 7;
    phase.overlay_steps = 100;
    phase.out_dir = (dir / "phase").string();
    CHECK(run(phase) == kExitOk);
    CHECK(fs::exists(dir / "phase" / "phase_grid.csv"));
    CHECK(fs::exists(dir / "phase" / "phase_overlay.csv"));
}
