// Command-line front end. Every subcommand is translated into scenario text
// and run through the same parser, so flags and scenario files share one
// validator and one report format.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bornlab/report.hpp"
#include "bornlab/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInvalid = 2;

struct Globals {
    std::string scenario;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    bool expect_strict = false;
    bool quiet = false;
};

std::string join(const std::vector<std::string> &items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? ", " : "") + items[i];
    }
    return out;
}

std::filesystem::path output_dir(const Globals &g) {
    if (!g.out.empty()) {
        return g.out;
    }
    if (const char *env = std::getenv("BORNLAB_OUT"); env != nullptr && *env != '\0') {
        return env;
    }
    return "bornlab-out";
}

int run(const bornlab::ScenarioSpec &parsed, const Globals &g) {
    bornlab::ScenarioSpec spec = parsed;
    if (g.seed) {
        spec.seed = *g.seed;
    }
    const bornlab::Report report = bornlab::run_scenario(spec, g.jobs, g.expect_strict);
    const auto dir = output_dir(g);
    const auto files = bornlab::write_report(report, dir);
    if (!g.quiet) {
        std::cout << bornlab::summary_text(report);
        std::cout << "wrote " << files.size() << " file(s) to " << dir.string() << "\n";
    }
    if (!report.mismatches.empty()) {
        for (const auto &m : report.mismatches) {
            std::cerr << "mismatch: " << m << "\n";
        }
        return kExitMismatch;
    }
    return kExitOk;
}

int run_text(const std::string &text, const Globals &g) { return run(bornlab::parse_scenario(text), g); }

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Probability-assignment laboratory: property checks, fits and derivation harnesses"};
    app.set_version_flag("--version", std::string(bornlab::artifact_version()));
    app.fallthrough();
    Globals g;
    app.add_option("--scenario", g.scenario, "Scenario file to run");
    app.add_option("--out", g.out, "Output directory (default: $BORNLAB_OUT, else ./bornlab-out)");
    app.add_option("--seed", g.seed, "Override the scenario seed");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--expect-strict", g.expect_strict,
                 "Unlisted matrix cells must hold and blocks without 'expect' must pass");
    app.add_flag("--quiet", g.quiet, "Print nothing on success");

    // check
    auto *check = app.add_subcommand("check", "Property matrix for chosen assignments and properties");
    std::vector<std::string> check_assignments = bornlab::matrix_assignment_names();
    std::vector<std::string> check_properties = bornlab::property_names();
    std::vector<std::size_t> check_dims{2, 3, 4, 5};
    std::size_t check_trials = 200;
    std::string check_tol = "1e-9";
    std::string check_tags = "mixed";
    bool check_lemma = false;
    check->add_option("--assignments", check_assignments, "Assignment names")->delimiter(',');
    check->add_option("--properties", check_properties, "Property names")->delimiter(',');
    check->add_option("--dims", check_dims, "Dimensions cycled over trials")->delimiter(',');
    check->add_option("--trials", check_trials, "Trials per dimension");
    check->add_option("--tolerance", check_tol, "Comparison tolerance");
    check->add_option("--tags", check_tags, "Tag policy: none, rational or mixed");
    check->add_flag("--lemma1", check_lemma, "Also cross-check strong normalization against its two halves");

    // gleason-fit
    auto *gleason = app.add_subcommand("gleason-fit", "Least-squares density fit of a frame function");
    std::string gl_assignment = "born";
    std::vector<std::size_t> gl_dims{3};
    std::size_t gl_frames = 20;
    std::size_t gl_repeats = 1;
    std::string gl_threshold = "1e-6";
    gleason->add_option("--assignment", gl_assignment, "Assignment to fit");
    gleason->add_option("--dims", gl_dims, "Dimensions")->delimiter(',');
    gleason->add_option("--frames", gl_frames, "Random bases per fit");
    gleason->add_option("--repeats", gl_repeats, "Fits per dimension");
    gleason->add_option("--threshold", gl_threshold, "Regularity threshold on the RMS residual");

    // envariance
    auto *env = app.add_subcommand("envariance", "Envariance residuals and the swap constraint system");
    std::vector<std::size_t> env_dims{2, 3, 4, 5, 6, 7, 8};
    std::size_t env_swap = 64;
    env->add_option("--dims", env_dims, "Schmidt ranks d_S = d_E")->delimiter(',');
    env->add_option("--swap-max", env_swap, "Largest n for the swap derivation");

    // finegrain
    auto *fine = app.add_subcommand("finegrain", "Fine-graining against the conditional chain");
    std::string fg_pairs = "1:2, 2:3, 617:1000";
    std::size_t fg_max = 0;
    fine->add_option("--pairs", fg_pairs, "Comma-separated m:n pairs");
    fine->add_option("--exhaustive-max", fg_max, "Also check every 1 <= m <= n <= this bound");

    // hartle
    auto *hartle = app.add_subcommand("hartle", "Frequency-operator convergence and the mixture gap");
    std::string h_p = "1/2";
    std::vector<std::size_t> h_grid{100, 1000, 10000, 100000};
    std::size_t h_states = 0;
    hartle->add_option("--p", h_p, "Outcome probability");
    hartle->add_option("--grid", h_grid, "Copy counts, strictly increasing")->delimiter(',');
    hartle->add_option("--bruteforce-states", h_states, "Random states per dimension for the explicit oracle");

    // continuity
    auto *cont = app.add_subcommand("continuity", "Jump search along a one-parameter path");
    std::string c_assignment;
    std::string c_path;
    std::string c_grid;
    std::string c_tol = "1e-9";
    cont->add_option("--assignment", c_assignment, "Assignment")->required();
    cont->add_option("--path", c_path, "amplitude-sweep, scaling-sweep or frame-rotation")->required();
    cont->add_option("--grid", c_grid, "Comma-separated parameters in Q(sqrt2), e.g. '0.29, 1 - 1/2*sqrt2'")
        ->required();
    cont->add_option("--tolerance", c_tol, "Jump threshold");

    // pathology
    auto *path = app.add_subcommand("pathology", "Cauchy checks and a discontinuity witness for two-slope");
    std::string p_c1 = "1";
    std::string p_c2 = "10000";
    std::size_t p_pairs = 10000;
    std::string p_window = "1e-6";
    path->add_option("--c1", p_c1, "Slope along 1");
    path->add_option("--c2", p_c2, "Slope along sqrt2");
    path->add_option("--pairs", p_pairs, "Random pairs for the Cauchy check");
    path->add_option("--window", p_window, "Largest distance between the witness points");

    auto *list = app.add_subcommand("list", "Catalog of names accepted in scenarios");

    app.require_subcommand(0, 1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitInvalid;
    }

    try {
        if (list->parsed()) {
            std::cout << bornlab::list_catalog();
            return kExitOk;
        }
        const std::string seed_line = "seed = " + std::to_string(g.seed.value_or(1)) + "\n";
        std::ostringstream text;
        if (check->parsed()) {
            std::vector<std::string> dims;
            for (auto d : check_dims) {
                dims.push_back(std::to_string(d));
            }
            text << "name = check\n"
                 << seed_line << "dims = " << join(dims) << "\nassignments = " << join(check_assignments)
                 << "\nproperties = " << join(check_properties) << "\ntrials = " << check_trials
                 << "\ntolerance = " << check_tol << "\ntags = " << check_tags
                 << "\nlemma1 = " << (check_lemma ? "true" : "false") << "\n";
            return run_text(text.str(), g);
        }
        auto list_of = [](const std::vector<std::size_t> &v) {
            std::vector<std::string> s;
            for (auto x : v) {
                s.push_back(std::to_string(x));
            }
            return join(s);
        };
        if (gleason->parsed()) {
            text << "name = gleason-fit\n"
                 << seed_line << "[gleason]\nassignment = " << gl_assignment << "\ndims = " << list_of(gl_dims)
                 << "\nframes = " << gl_frames << "\nrepeats = " << gl_repeats << "\nthreshold = " << gl_threshold
                 << "\n";
        } else if (env->parsed()) {
            text << "name = envariance\n"
                 << seed_line << "[envariance]\ndims = " << list_of(env_dims) << "\nswap_max = " << env_swap << "\n";
        } else if (fine->parsed()) {
            text << "name = finegrain\n" << seed_line << "[finegrain]\npairs = " << fg_pairs << "\n";
            if (fg_max > 0) {
                text << "exhaustive_max = " << fg_max << "\n";
            }
        } else if (hartle->parsed()) {
            text << "name = hartle\n"
                 << seed_line << "[hartle]\np = " << h_p << "\ngrid = " << list_of(h_grid) << "\n";
            if (h_states > 0) {
                text << "bruteforce_states = " << h_states << "\n";
            }
        } else if (cont->parsed()) {
            text << "name = continuity\n"
                 << seed_line << "[continuity]\nassignment = " << c_assignment << "\npath = " << c_path
                 << "\ngrid = " << c_grid << "\ntolerance = " << c_tol << "\n";
        } else if (path->parsed()) {
            text << "name = pathology\n"
                 << seed_line << "[pathology]\nc1 = " << p_c1 << "\nc2 = " << p_c2 << "\npairs = " << p_pairs
                 << "\nwindow = " << p_window << "\n";
        } else if (!g.scenario.empty()) {
            return run(bornlab::load_scenario(g.scenario), g);
        } else {
            std::cerr << app.help();
            return kExitInvalid;
        }
        return run_text(text.str(), g);
    } catch (const bornlab::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
}
