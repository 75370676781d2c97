// ectstat: Euler characteristic transforms of binary shapes and permutation
// two-sample tests between shape collections.
//
//   ectstat transform <images|dirs>... --out DIR
//   ectstat test --group1 DIR --group2 DIR
//   ectstat simulate [--config FILE] --out DIR
//
// Exit codes: 0 accept / success, 3 reject, 64 usage, 65 bad data,
// 66 missing input, 70 internal error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ectstat/errors.hpp"
#include "ectstat/io.hpp"
#include "ectstat/manifest.hpp"
#include "ectstat/nhst.hpp"
#include "ectstat/parallel.hpp"
#include "ectstat/simgen.hpp"
#include "ectstat/transform.hpp"

namespace fs = std::filesystem;
using namespace ectstat;

namespace {

constexpr int kExitReject = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitSoftware = 70;

class MissingInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<fs::path> collect(const std::vector<std::string>& args, const std::vector<std::string>& extensions) {
    std::vector<fs::path> out;
    for (const auto& a : args) {
        const fs::path p(a);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (!entry.is_regular_file()) continue;
                std::string ext = entry.path().extension().string();
                std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
                if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) found.push_back(entry.path());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw MissingInput(a + ": no such file or directory");
        }
    }
    return out;
}

std::string join_reals(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_real(v[i]);
    return s;
}

// ---------------------------------------------------------------- transform

struct TransformOptions {
    std::vector<std::string> inputs;
    std::size_t directions = 72;
    std::vector<double> angles;
    std::size_t levels = 100;
    double radius = 1.0;
    double pitch = 0.0;
    double threshold = 0.5;
    std::string mode = "sect";
    std::string out;
};

int run_transform(const TransformOptions& opt) {
    RunManifest manifest;
    manifest.command = "transform";
    manifest.started_utc = utc_timestamp();

    const auto files = collect(opt.inputs, {".pgm", ".png"});
    if (files.empty()) throw MissingInput("no .pgm or .png inputs found");
    const DirectionGrid dirs = opt.angles.empty() ? uniform_directions(opt.directions) : directions_from_angles(opt.angles);
    const LevelGrid levels = uniform_levels(opt.levels, 2.0 * opt.radius);

    std::vector<std::string> rendered(files.size());
    std::vector<std::string> digests(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        const std::string bytes = io::read_file(files[i]);
        digests[i] = io::sha256_hex(bytes);
        const io::GrayImage img = io::read_image(files[i]);
        const double pitch = opt.pitch > 0.0 ? opt.pitch : io::auto_pitch(img.width, img.height, opt.radius);
        GridShape shape = [&] {
            try {
                return io::threshold_image(img, opt.threshold, opt.radius, pitch);
            } catch (const InvalidArgument& e) {
                throw ParseError(files[i].string() + ": " + e.what());
            } catch (const ShapeExceedsBall& e) {
                throw ShapeExceedsBall(files[i].string() + ": " + e.what());
            }
        }();
        rendered[i] = opt.mode == "ect" ? io::format_matrix_csv(ect(shape, dirs, levels))
                                        : io::format_matrix_csv(sect(shape, dirs, levels));
    });

    fs::create_directories(opt.out);
    for (std::size_t i = 0; i < files.size(); ++i) {
        const fs::path target = fs::path(opt.out) / (files[i].stem().string() + ".csv");
        io::write_file_atomic(target, rendered[i]);
        manifest.inputs.push_back({files[i].string(), digests[i]});
        manifest.outputs.push_back({target.filename().string(), io::sha256_hex(rendered[i])});
    }
    std::vector<double> angles;
    for (const auto& d : dirs.directions()) angles.push_back(d.angle());
    manifest.config = {{"mode", opt.mode},         {"directions", dirs.size()},  {"angles", join_reals(angles)},
                       {"levels", opt.levels},     {"radius", opt.radius},       {"horizon", 2.0 * opt.radius},
                       {"pitch", opt.pitch > 0.0 ? nlohmann::ordered_json(opt.pitch) : nlohmann::ordered_json("auto")},
                       {"threshold", opt.threshold}};
    manifest.finished_utc = utc_timestamp();
    io::write_file_atomic(fs::path(opt.out) / "manifest.json", manifest.to_json().dump(2) + "\n");
    std::cerr << "ectstat: wrote " << files.size() << " " << opt.mode << " matrices to " << opt.out << '\n';
    return 0;
}

// --------------------------------------------------------------------- test

struct TestOptions {
    std::string group1;
    std::string group2;
    double alpha = 0.05;
    std::size_t permutations = 1000;
    std::uint64_t seed = 0;
    std::string mode = "sect";
    std::string out;
};

template <typename Matrix>
std::vector<Matrix> load_group(const std::vector<fs::path>& files, RunManifest& manifest) {
    std::vector<Matrix> out;
    for (const auto& f : files) {
        const std::string text = io::read_file(f);
        manifest.inputs.push_back({f.string(), io::sha256_hex(text)});
        const io::MatrixCsv csv = io::parse_matrix_csv(text, f.string());
        if constexpr (std::is_same_v<Matrix, ECTMatrix>) {
            out.push_back(io::to_ect(csv, f.string()));
        } else {
            out.push_back(io::to_sect(csv));
        }
    }
    return out;
}

template <typename Matrix>
TestResult test_groups(const std::vector<fs::path>& g1, const std::vector<fs::path>& g2, const TestConfig& cfg,
                       RunManifest& manifest) {
    std::vector<Matrix> all = load_group<Matrix>(g1, manifest);
    std::vector<Matrix> second = load_group<Matrix>(g2, manifest);
    all.insert(all.end(), std::make_move_iterator(second.begin()), std::make_move_iterator(second.end()));
    const DistanceMatrix dist = pairwise_distances(std::span<const Matrix>(all));
    return permutation_test(dist, GroupLabels::from_sizes(g1.size(), g2.size()), cfg);
}

int run_test(const TestOptions& opt) {
    RunManifest manifest;
    manifest.command = "test";
    manifest.started_utc = utc_timestamp();
    const auto g1 = collect({opt.group1}, {".csv"});
    const auto g2 = collect({opt.group2}, {".csv"});
    if (g1.size() < 2 || g2.size() < 2) {
        throw DegenerateGroup("each group directory needs at least 2 matrix files (got " + std::to_string(g1.size()) +
                              " and " + std::to_string(g2.size()) + ")");
    }
    const TestConfig cfg{opt.alpha, opt.permutations, opt.seed};
    const TestResult r = opt.mode == "ect" ? test_groups<ECTMatrix>(g1, g2, cfg, manifest)
                                           : test_groups<SECTMatrix>(g1, g2, cfg, manifest);
    manifest.config = {{"mode", opt.mode}, {"alpha", opt.alpha}, {"permutations", opt.permutations}, {"seed", opt.seed}};
    manifest.finished_utc = utc_timestamp();

    nlohmann::ordered_json j;
    j["decision"] = to_string(r.decision);
    j["p_value"] = r.p_value;
    j["observed_loss"] = r.observed_loss;
    j["k_star"] = r.threshold_index;
    j["alpha"] = opt.alpha;
    j["permutations"] = opt.permutations;
    j["seed"] = opt.seed;
    j["n1"] = g1.size();
    j["n2"] = g2.size();
    j["mode"] = opt.mode;
    j["manifest"] = manifest.to_json();
    const std::string text = j.dump(2) + "\n";
    std::cout << text;
    if (!opt.out.empty()) io::write_file_atomic(opt.out, text);
    return r.decision == Decision::Reject ? kExitReject : 0;
}

// ----------------------------------------------------------------- simulate

struct SimulateOptions {
    ExperimentConfig cfg;
    std::string method = "both";
    std::string out;
};

int run_simulate(const SimulateOptions& opt, const std::string& config_file) {
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.started_utc = utc_timestamp();
    if (!config_file.empty()) manifest.inputs.push_back({config_file, io::sha256_hex(io::read_file(config_file))});

    std::vector<Method> methods;
    if (opt.method == "both" || opt.method == "sect") methods.push_back(Method::SECT);
    if (opt.method == "both" || opt.method == "ect") methods.push_back(Method::ECT);
    const ExperimentResult result = run_experiment(opt.cfg, methods);

    fs::create_directories(opt.out);
    auto emit = [&](const std::string& name, const std::string& text) {
        io::write_file_atomic(fs::path(opt.out) / name, text);
        manifest.outputs.push_back({name, io::sha256_hex(text)});
    };
    for (const auto& table : result.tables) {
        std::string rates = "epsilon,rate,replicates\n";
        for (const auto& row : table.rows) {
            rates += io::format_real(row.epsilon) + "," + io::format_real(row.rate()) + "," +
                     std::to_string(row.replicates) + "\n";
        }
        emit(std::string("rejection_rates_") + to_string(table.method) + ".csv", rates);

        std::string pvals = "epsilon,replicate,p_value,observed_loss,decision\n";
        for (const auto& rec : result.records) {
            if (rec.method != table.method) continue;
            pvals += io::format_real(rec.epsilon) + "," + std::to_string(rec.replicate) + "," +
                     io::format_real(rec.p_value) + "," + io::format_real(rec.observed_loss) + "," +
                     to_string(rec.decision) + "\n";
        }
        emit(std::string("pvalues_") + to_string(table.method) + ".csv", pvals);
    }
    std::string curves = "epsilon,angle,t,sect\n";
    for (const auto& ex : result.examples) {
        for (std::size_t p = 0; p < ex.sect.rows(); ++p) {
            for (std::size_t q = 0; q < ex.sect.cols(); ++q) {
                curves += io::format_real(ex.epsilon) + "," + io::format_real(ex.sect.direction_grid()[p].angle()) + "," +
                          io::format_real(ex.sect.level_grid()[q]) + "," + io::format_real(ex.sect(p, q)) + "\n";
            }
        }
    }
    emit("sect_curves.csv", curves);

    const auto& c = opt.cfg;
    manifest.config = {{"method", opt.method},          {"epsilons", join_reals(c.epsilons)},
                       {"n", c.n_per_group},            {"replicates", c.replicates},
                       {"angles", join_reals(c.direction_angles)},
                       {"levels", c.levels},            {"radius", c.radius},
                       {"horizon", 2.0 * c.radius},     {"resolution", c.resolution},
                       {"noise_mean", c.noise_mean},    {"noise_sd", c.noise_sd},
                       {"alpha", c.alpha},              {"permutations", c.permutations},
                       {"seed", c.seed}};
    manifest.finished_utc = utc_timestamp();
    io::write_file_atomic(fs::path(opt.out) / "manifest.json", manifest.to_json().dump(2) + "\n");

    for (const auto& table : result.tables) {
        std::cerr << "ectstat: " << to_string(table.method) << " rejection rates:";
        for (const auto& row : table.rows) std::cerr << "  eps=" << row.epsilon << ":" << row.rate();
        std::cerr << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler characteristic transforms and permutation tests for binary shapes", "ectstat"};
    app.set_version_flag("--version", std::string("ectstat ") + kToolVersion);
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads, "Worker threads (default: $ECTSTAT_THREADS or all cores)");
    auto* cfg_opt = app.set_config("--config", "", "INI file; a [simulate] section sets simulate options, flags override it");

    TransformOptions topt;
    auto* tcmd = app.add_subcommand("transform", "Write one ECT/SECT matrix CSV per input image");
    tcmd->add_option("inputs", topt.inputs, "PGM/PNG files or directories")->required();
    auto* dir_opt = tcmd->add_option("--directions", topt.directions, "Number of evenly spaced directions")
                        ->check(CLI::PositiveNumber);
    tcmd->add_option("--angles", topt.angles, "Explicit direction angles in radians")->delimiter(',')->excludes(dir_opt);
    tcmd->add_option("--levels", topt.levels, "Number of sublevels")->check(CLI::PositiveNumber);
    tcmd->add_option("--radius", topt.radius, "Ball radius R (horizon T = 2R)")->check(CLI::PositiveNumber);
    tcmd->add_option("--pitch", topt.pitch, "Physical pixel width (default: fit image inside the ball)");
    tcmd->add_option("--threshold", topt.threshold, "Foreground iff intensity >= threshold")->check(CLI::Range(0.0, 1.0));
    tcmd->add_option("--mode", topt.mode)->check(CLI::IsMember({"ect", "sect"}));
    tcmd->add_option("--out", topt.out, "Output directory")->required();

    TestOptions sopt;
    auto* scmd = app.add_subcommand("test", "Permutation test between two directories of matrix CSVs");
    scmd->add_option("--group1", sopt.group1)->required();
    scmd->add_option("--group2", sopt.group2)->required();
    scmd->add_option("--alpha", sopt.alpha)->check(CLI::Range(0.0, 1.0));
    scmd->add_option("--permutations", sopt.permutations)->check(CLI::PositiveNumber);
    scmd->add_option("--seed", sopt.seed);
    scmd->add_option("--mode", sopt.mode)->check(CLI::IsMember({"ect", "sect"}));
    scmd->add_option("--out", sopt.out, "Also write the JSON result here");

    SimulateOptions mopt;
    auto& c = mopt.cfg;
    auto* mcmd = app.add_subcommand("simulate", "Rejection-rate experiment on simulated two-arm shapes");
    mcmd->add_option("--epsilons", c.epsilons)->delimiter(',');
    mcmd->add_option("--n", c.n_per_group, "Shapes per group");
    mcmd->add_option("--replicates", c.replicates);
    mcmd->add_option("--angles", c.direction_angles, "Direction angles in radians")->delimiter(',');
    mcmd->add_option("--levels", c.levels);
    mcmd->add_option("--radius", c.radius);
    mcmd->add_option("--resolution", c.resolution, "Raster pixels per side");
    mcmd->add_option("--noise-mean", c.noise_mean);
    mcmd->add_option("--noise-sd", c.noise_sd);
    mcmd->add_option("--alpha", c.alpha);
    mcmd->add_option("--permutations", c.permutations);
    mcmd->add_option("--seed", c.seed);
    mcmd->add_option("--method", mopt.method)->check(CLI::IsMember({"both", "sect", "ect"}));
    mcmd->add_option("--out", mopt.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    if (threads > 0) set_thread_count(threads);

    try {
        if (*tcmd) return run_transform(topt);
        if (*scmd) return run_test(sopt);
        if (*mcmd) {
            const std::string cfg_file = cfg_opt && cfg_opt->count() ? cfg_opt->as<std::string>() : "";
            return run_simulate(mopt, cfg_file);
        }
    } catch (const MissingInput& e) {
        std::cerr << "ectstat: " << e.what() << '\n';
        return kExitNoInput;
    } catch (const ParseError& e) {
        std::cerr << "ectstat: parse error: " << e.what() << '\n';
        return kExitData;
    } catch (const ConfigError& e) {
        std::cerr << "ectstat: configuration error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const IncompatibleGrids& e) {
        std::cerr << "ectstat: incompatible grids: " << e.what() << '\n';
        return kExitData;
    } catch (const DegenerateGroup& e) {
        std::cerr << "ectstat: " << e.what() << '\n';
        return kExitData;
    } catch (const ShapeExceedsBall& e) {
        std::cerr << "ectstat: " << e.what() << '\n';
        return kExitData;
    } catch (const InvalidArgument& e) {
        std::cerr << "ectstat: invalid argument: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "ectstat: error: " << e.what() << '\n';
        return kExitSoftware;
    }
    return kExitUsage;
}
