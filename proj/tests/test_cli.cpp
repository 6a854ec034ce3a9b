#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "lyap/analysis.hpp"
#include "lyap/cli.hpp"

using namespace lyap;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string write_tmp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / ("lyap_cli_" + name);
    std::ofstream out(path);
    out << content;
    return path.string();
}

std::string vertex_path() {
    return write_tmp("vertex.json",
                     R"({"d": 2, "matrices": [{"u": [10, 1]}, {"u": [1, 10]}, {"u": [3, 3]}]})");
}

std::string ortho_path() {
    return write_tmp("ortho.json",
                     R"({"d": 2, "matrices": [{"u": [1, 0]}, {"u": [0, 1]}]})");
}

std::string c5_path() { return write_tmp("c5.txt", "5\n1 2\n2 3\n3 4\n4 5\n1 5\n"); }

struct Run {
    CommandResult result;
    std::string err;
};

Run invoke(const std::vector<std::string>& argv) {
    std::ostringstream err;
    CommandResult r = run(argv, err);
    return {std::move(r), err.str()};
}

}  // namespace

TEST_CASE("analyze emits the envelope, bounds, and exact rate") {
    const Run r = invoke({"analyze", "--ensemble", vertex_path(), "--dist", "0,0,1"});
    REQUIRE(r.result.exit_code == 0);
    const auto& out = r.result.payload;
    REQUIRE(out["tool"] == "lyap");
    REQUIRE(out["version"] == "1.0.0");
    REQUIRE(out["command"] == "analyze");
    REQUIRE(out["seed"].is_null());
    REQUIRE(out["lambda"].get<double>() == Catch::Approx(fixtures::LOG_18).margin(1e-12));
    REQUIRE(out["radius"].get<double>() == Catch::Approx(18.0).margin(1e-9));
    REQUIRE(out["bounds"]["lower"].get<double>() ==
            Catch::Approx(fixtures::LOG_18).margin(1e-12));
    REQUIRE(out["bounds"]["upper"].get<double>() ==
            Catch::Approx(fixtures::LOG_101).margin(1e-12));
    REQUIRE(out["bounds"]["argmax_vertex"] == 1);
}

TEST_CASE("analyze folds in mixtures and kernels") {
    const std::string mix = write_tmp("mixture.json", R"({"components": [
        {"weight": 0.5, "dist": [0.5, 0.5, 0]},
        {"weight": 0.5, "dist": [0, 0, 1]}]})");
    const std::string ker = write_tmp("kernel.json",
                                      R"([[0.25, 0.25, 0.5],
                                          [0.25, 0.25, 0.5],
                                          [0.25, 0.25, 0.5]])");
    const Run r = invoke({"analyze", "--ensemble", vertex_path(), "--mixture", mix,
                          "--kernel", ker});
    REQUIRE(r.result.exit_code == 0);
    const auto& out = r.result.payload;
    const double mix_expect =
        0.5 * 0.5 * (fixtures::LOG_101 + fixtures::LOG_20) + 0.5 * fixtures::LOG_18;
    REQUIRE(out["mixture_rate"].get<double>() == Catch::Approx(mix_expect).margin(1e-12));
    const double ker_expect =
        lyapunov_exponent(fixtures::example_vertex(), SimplexPoint({0.25, 0.25, 0.5}));
    REQUIRE(out["markov_rate"].get<double>() == Catch::Approx(ker_expect).margin(1e-12));
    REQUIRE(out["stationary"].size() == 3);
    REQUIRE(out["stationary"][2].get<double>() == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("sphere closed form") {
    const Run r = invoke({"sphere", "--dim", "3"});
    REQUIRE(r.result.exit_code == 0);
    REQUIRE(r.result.payload["exact"].get<double>() == Catch::Approx(-1.0).margin(1e-14));
    REQUIRE(r.result.payload["seed"].is_null());
    REQUIRE(r.result.payload["asymptotic"].is_number());

    const Run sim = invoke({"sphere", "--dim", "3", "--simulate", "--seed", "9",
                            "--steps", "2000", "--trials", "4"});
    REQUIRE(sim.result.exit_code == 0);
    REQUIRE(sim.result.payload["seed"] == 9);
    REQUIRE(sim.result.payload["per_trial"].size() == 4);

    REQUIRE(invoke({"sphere", "--dim", "3", "--simulate"}).result.exit_code == 1);
    REQUIRE(invoke({"sphere", "--dim", "1"}).result.exit_code == 1);
}

TEST_CASE("decide reports the three verdicts") {
    SECTION("stabilizable with an annihilating witness") {
        const Run r = invoke({"decide", "--ensemble", ortho_path()});
        REQUIRE(r.result.exit_code == 0);
        const auto& out = r.result.payload;
        REQUIRE(out["verdict"] == "STABILIZABLE");
        REQUIRE(out["witness"][0].get<double>() == 0.5);
        REQUIRE(out["witness"][1].get<double>() == 0.5);
        REQUIRE(out["value"].is_string());
        REQUIRE(out["value"] == "-inf");
        REQUIRE_FALSE(out.contains("bracket"));
    }
    SECTION("certified NOT_STABILIZABLE has a null witness") {
        const Run r = invoke({"decide", "--ensemble", vertex_path()});
        REQUIRE(r.result.exit_code == 0);
        REQUIRE(r.result.payload["verdict"] == "NOT_STABILIZABLE");
        REQUIRE(r.result.payload["witness"].is_null());
        REQUIRE_FALSE(r.result.payload.contains("bracket"));
    }
    SECTION("near-zero minimum reports UNDETERMINED with a bracket") {
        // Scale each u by sqrt(c) so the matrices scale by c and the optimal
        // rate lands at -5e-7, inside the default +-1e-6 decision margin.
        const double s = std::exp(-(fixtures::LOG_18 + 5e-7) / 2.0);
        nlohmann::ordered_json j;
        j["d"] = 2;
        j["matrices"] = nlohmann::ordered_json::array();
        for (const auto& u : {std::vector<double>{10, 1}, {1, 10}, {3, 3}}) {
            nlohmann::ordered_json m;
            m["u"] = {u[0] * s, u[1] * s};
            j["matrices"].push_back(m);
        }
        const std::string path = write_tmp("near_zero.json", j.dump());
        const Run r = invoke({"decide", "--ensemble", path});
        REQUIRE(r.result.exit_code == 0);
        REQUIRE(r.result.payload["verdict"] == "UNDETERMINED");
        REQUIRE(r.result.payload["bracket"].size() == 2);
    }
}

TEST_CASE("optimize payload round-trips through analyze") {
    const std::string path = write_tmp(
        "interior.json",
        R"({"d": 2, "matrices": [{"u": [10, 1]}, {"u": [1, 10]}, {"u": [6.5, -3.5]}]})");
    const Run opt = invoke({"optimize", "--ensemble", path, "--seed", "3"});
    REQUIRE(opt.result.exit_code == 0);
    REQUIRE(opt.result.payload["seed"] == 3);
    REQUIRE(opt.result.payload["value"].get<double>() ==
            Catch::Approx(fixtures::INTERIOR_MIN).margin(1e-9));
    REQUIRE(opt.result.payload["trace"]["k_grid"] == 200);

    std::string csv;
    char buf[64];
    for (const auto& x : opt.result.payload["p_star"]) {
        std::snprintf(buf, sizeof buf, "%.17g", x.get<double>());
        if (!csv.empty()) csv += ",";
        csv += buf;
    }
    const Run ana = invoke({"analyze", "--ensemble", path, "--dist", csv});
    REQUIRE(ana.result.exit_code == 0);
    REQUIRE(ana.result.payload["lambda"].get<double>() ==
            Catch::Approx(opt.result.payload["value"].get<double>()).margin(1e-9));
}

TEST_CASE("identical invocations produce byte-identical payloads") {
    const std::string path = vertex_path();
    const Run a = invoke({"simulate", "--ensemble", path, "--dist", "0.2,0.3,0.5",
                          "--seed", "42", "--steps", "500", "--trials", "4"});
    const Run b = invoke({"simulate", "--ensemble", path, "--dist", "0.2,0.3,0.5",
                          "--seed", "42", "--steps", "500", "--trials", "4"});
    REQUIRE(a.result.exit_code == 0);
    REQUIRE(payload_text(a.result) == payload_text(b.result));
    REQUIRE_FALSE(payload_text(a.result).empty());
}

TEST_CASE("dense and telescoped CLI runs agree per trajectory") {
    const std::string path = vertex_path();
    const Run dense = invoke({"simulate", "--ensemble", path, "--dist", "0.2,0.3,0.5",
                              "--seed", "7", "--steps", "400", "--trials", "3",
                              "--method", "dense"});
    const Run tele = invoke({"simulate", "--ensemble", path, "--dist", "0.2,0.3,0.5",
                             "--seed", "7", "--steps", "400", "--trials", "3",
                             "--method", "telescoped"});
    REQUIRE(dense.result.exit_code == 0);
    REQUIRE(tele.result.exit_code == 0);
    for (int t = 0; t < 3; ++t)
        REQUIRE(dense.result.payload["per_trial"][t].get<double>() ==
                Catch::Approx(tele.result.payload["per_trial"][t].get<double>()).margin(1e-9));
}

TEST_CASE("markov simulation via the CLI consumes a kernel file") {
    const std::string ker = write_tmp("kernel3.json",
                                      R"([[0.25, 0.25, 0.5],
                                          [0.25, 0.25, 0.5],
                                          [0.25, 0.25, 0.5]])");
    const Run r = invoke({"simulate", "--ensemble", vertex_path(), "--method", "markov",
                          "--kernel", ker, "--seed", "5", "--steps", "300", "--trials", "2"});
    REQUIRE(r.result.exit_code == 0);
    REQUIRE(r.result.payload["estimate"].is_number());
    REQUIRE(invoke({"simulate", "--ensemble", vertex_path(), "--method", "markov",
                    "--seed", "5"})
                .result.exit_code == 1);
}

TEST_CASE("convexity verdicts for the canonical projector pair") {
    const Run r = invoke({"convexity", "--ensemble", ortho_path()});
    REQUIRE(r.result.exit_code == 0);
    const auto& out = r.result.payload;
    REQUIRE(out["cond_psd"] == true);
    REQUIRE(out["cond_nsd"] == false);
    REQUIRE(out["classification"] == "convex");
    REQUIRE(out["witness_psd_violation"].is_null());
    REQUIRE(out["witness_nsd_violation"].size() == 2);
    REQUIRE(out["martin_triangle_violations"].is_array());
    REQUIRE(out["martin_triangle_violations"].empty());
}

TEST_CASE("reduce emits the artifacts and the exact alpha") {
    const Run r = invoke({"reduce", "--graph", c5_path()});
    REQUIRE(r.result.exit_code == 0);
    const auto& out = r.result.payload;
    REQUIRE(out["n"] == 5);
    REQUIRE(out["edge_count"] == 5);
    REQUIRE(out["log_bound"].get<double>() ==
            Catch::Approx(fixtures::LOG_15_PLUS_E).margin(1e-12));
    REQUIRE(out["sandwich"]["pass"] == true);
    REQUIRE(out["alpha"] == 2);
    REQUIRE(out["alpha_witness"].size() == 2);
    REQUIRE(out["B"][0][0].get<double>() == Catch::Approx(15.0 + std::exp(1.0)).margin(1e-12));
    REQUIRE(out["M"].size() == 5);
    REQUIRE(out["ensemble"]["d"] == 5);
}

TEST_CASE("alpha brackets stay consistent with the exact count") {
    const Run r = invoke({"alpha", "--graph", c5_path(), "--tol", "0.05"});
    REQUIRE(r.result.exit_code == 0);
    const auto& out = r.result.payload;
    REQUIRE(out["alpha_exact"] == 2);
    REQUIRE(out["queries"].get<int>() > 0);
    REQUIRE(out["consistent"] == true);
    REQUIRE(out["bracket"].size() == 2);
    REQUIRE(out["expected_range"][0].get<double>() == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("markov plan payload uses 1-based cycle indices") {
    const Run r = invoke({"markov", "--ensemble", vertex_path()});
    REQUIRE(r.result.exit_code == 0);
    const auto& out = r.result.payload;
    REQUIRE(out["rate"].get<double>() == Catch::Approx(fixtures::LOG_18).margin(1e-12));
    REQUIRE(out["radius"].get<double>() == Catch::Approx(18.0).margin(1e-9));
    REQUIRE(out["cycle"] == nlohmann::ordered_json::array({3}));
    REQUIRE(out["kernel"][0][2].get<double>() == 1.0);
    REQUIRE(out["pi"][2].get<double>() == 1.0);
    REQUIRE(out["circulation"][2][2].get<double>() == 1.0);
}

TEST_CASE("usage and input failures exit 1 with stderr diagnostics") {
    SECTION("unknown subcommand") {
        const Run r = invoke({"frobnicate"});
        REQUIRE(r.result.exit_code == 1);
        REQUIRE_THAT(r.err, ContainsSubstring("usage"));
        REQUIRE(r.result.payload.is_null());
    }
    SECTION("unknown flag") {
        REQUIRE(invoke({"analyze", "--ensemble", vertex_path(), "--bogus"}).result.exit_code == 1);
    }
    SECTION("missing required seed") {
        REQUIRE(invoke({"optimize", "--ensemble", vertex_path()}).result.exit_code == 1);
    }
    SECTION("missing file") {
        const Run r = invoke({"analyze", "--ensemble", "/nonexistent/x.json"});
        REQUIRE(r.result.exit_code == 1);
        REQUIRE_THAT(r.err, ContainsSubstring("cannot open"));
    }
    SECTION("malformed ensemble JSON") {
        const Run r = invoke({"analyze", "--ensemble", write_tmp("bad.json", "{nope")});
        REQUIRE(r.result.exit_code == 1);
        REQUIRE_THAT(r.err, ContainsSubstring("error"));
    }
    SECTION("distribution that does not sum to 1") {
        const Run r =
            invoke({"analyze", "--ensemble", vertex_path(), "--dist", "0.5,0.2,0.2"});
        REQUIRE(r.result.exit_code == 1);
        REQUIRE_THAT(r.err, ContainsSubstring("sum"));
    }
    SECTION("steps out of range") {
        REQUIRE(invoke({"simulate", "--ensemble", vertex_path(), "--dist", "0,0,1",
                        "--seed", "1", "--steps", "0"})
                    .result.exit_code == 1);
        REQUIRE(invoke({"simulate", "--ensemble", vertex_path(), "--dist", "0,0,1",
                        "--seed", "1", "--steps", "2000000000"})
                    .result.exit_code == 1);
    }
    SECTION("ambiguous kernel surfaces as an input error") {
        const std::string ker = write_tmp("kernel_id.json", "[[1, 0], [0, 1]]");
        const Run r = invoke({"analyze", "--ensemble", ortho_path(), "--kernel", ker});
        REQUIRE(r.result.exit_code == 1);
        REQUIRE_THAT(r.err, ContainsSubstring("ambiguous"));
    }
}

TEST_CASE("help goes to the diagnostic stream and exits 0") {
    const Run r = invoke({"--help"});
    REQUIRE(r.result.exit_code == 0);
    REQUIRE(r.result.payload.is_null());
    REQUIRE_THAT(r.err, ContainsSubstring("Lyapunov"));
    REQUIRE(invoke({"analyze", "--help"}).result.exit_code == 0);
}

TEST_CASE("payload text formatting") {
    const Run r = invoke({"sphere", "--dim", "4"});
    const std::string flat = payload_text(r.result, false);
    const std::string pretty = payload_text(r.result, true);
    REQUIRE(flat.find('\n') == std::string::npos);
    REQUIRE(pretty.find('\n') != std::string::npos);
    REQUIRE(nlohmann::ordered_json::parse(flat) == nlohmann::ordered_json::parse(pretty));
}
