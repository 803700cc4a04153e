// divlab: experiments around power-weighted divisor counting functions,
// their summatory main terms, and the mean square of the remainder.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "divlab/json_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace divlab;

namespace {

struct Options {
    std::string a_csv;
    std::uint64_t N = 1'000'000;
    double T = 0; // default: N
    int precision = 50;
    int quad_order = 8;
    std::uint64_t m_prime = 1000;
    std::string window; // "lo:hi"
    std::string out_dir = "out";
    std::string cache_dir = "cache";
    unsigned threads = 1;
    bool deterministic = false;
    // config-file-only knobs
    std::uint64_t samples = 4096;
    std::uint64_t memory_budget = DivisorTable::kDefaultMemoryBudget;
    unsigned em_terms = 200;
    unsigned bernoulli_pairs = 40;
};

struct FileTracker {
    std::vector<fs::path> written;
    bool keep = false;
    ~FileTracker() {
        if (keep)
            return;
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
    }
};

void write_text(FileTracker& files, const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write " + p.string());
    out << text;
    files.written.push_back(p);
}

void write_json(FileTracker& files, const fs::path& p, const json& j) {
    write_text(files, p, j.dump(2) + "\n");
}

std::pair<double, double> parse_window(const std::string& s) {
    const auto sep = s.find_first_of(":,");
    if (sep == std::string::npos)
        throw ConfigError("window must be 'lo:hi', got '" + s + "'");
    try {
        double lo = std::stod(s.substr(0, sep));
        double hi = std::stod(s.substr(sep + 1));
        return {lo, hi};
    } catch (const std::exception&) {
        throw ConfigError("window must be 'lo:hi', got '" + s + "'");
    }
}

MainTermConfig main_term_config(const Options& opt) {
    MainTermConfig cfg;
    cfg.digits = opt.precision;
    cfg.zeta.em_terms = opt.em_terms;
    cfg.zeta.bernoulli_pairs = opt.bernoulli_pairs;
    return cfg;
}

json exponents_report(const ExponentTuple& a, const Options& opt) {
    const auto& profile = MomentProfile::weak_default();
    json j;
    j["schema"] = "divlab/1";
    j["tuple"] = a.values();
    j["k"] = a.k();
    j["constants"] = to_json(derive_constants(a), std::max(60, opt.precision));
    ApplicabilityReport rep = check_applicability(a, profile);
    j["applicability"] = to_json(rep);
    if (a.k() == 3) {
        try {
            Eta3Result e3 = eta3(a);
            j["eta3"] = {{"value", rational_json(e3.value)}, {"case", to_string(e3.branch)}};
        } catch (const InapplicabilityError& e) {
            j["eta3"] = {{"inapplicable", true}, {"reason", e.what()}};
        }
    }
    return j;
}

DivisorTable open_table(const ExponentTuple& a, const Options& opt, json* meta) {
    bool rebuilt = false;
    DivisorTable t = DivisorTable::open_cached(a, opt.N, opt.cache_dir, &rebuilt,
                                               opt.memory_budget);
    if (meta) {
        (*meta)["N"] = t.limit();
        (*meta)["checksum"] = t.checksum();
        if (!opt.deterministic) {
            (*meta)["from_cache"] = !rebuilt;
            if (rebuilt)
                (*meta)["build_unix_time"] = t.build_unix_time();
        }
    }
    return t;
}

std::string csv_meansquare(const MeanSquareProfile& p) {
    std::ostringstream os;
    os << "T,V,ratio\n";
    os.precision(17);
    for (const auto& cp : p.checkpoints)
        os << cp.T << "," << cp.V << "," << cp.ratio << "\n";
    return os.str();
}

std::string loglog_data(const MeanSquareProfile& p) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& cp : p.checkpoints)
        if (cp.V > 0)
            os << std::log10(cp.T) << " " << std::log10(cp.V) << "\n";
    return os.str();
}

int run(const std::string& cmd, const Options& opt, FileTracker& files) {
    const ExponentTuple a = ExponentTuple::parse(opt.a_csv);
    const fs::path out_dir = opt.out_dir;
    const double T = opt.T > 0 ? opt.T : static_cast<double>(opt.N);
    if (T > static_cast<double>(opt.N))
        throw ConfigError("T must not exceed N");

    if (cmd == "exponents") {
        json j = exponents_report(a, opt);
        write_json(files, out_dir / ("exponents-" + a.label() + ".json"), j);
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (cmd == "sieve") {
        json j;
        j["schema"] = "divlab/1";
        j["tuple"] = a.values();
        DivisorTable t = open_table(a, opt, &j);
        j["cache_file"] = (fs::path(opt.cache_dir) /
                           DivisorTable::cache_file_name(a, opt.N))
                              .string();
        j["prefix_d_total"] = t.prefix_d(t.limit());
        j["prefix_dhat_total"] = t.prefix_dhat(t.limit());
        j["prefix_c_total"] = t.prefix_c(t.limit());
        write_json(files, out_dir / ("sieve-" + a.label() + "-N" + std::to_string(opt.N) + ".json"), j);
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (cmd == "main-term") {
        MainTerm M = compute_main_term(a, main_term_config(opt));
        json j = to_json(M);
        j["schema"] = "divlab/1";
        write_json(files, out_dir / ("mainterm-" + a.label() + ".json"), j);
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (cmd == "delta") {
        DivisorTable t = open_table(a, opt, nullptr);
        MainTerm M = compute_main_term(a, main_term_config(opt));
        double lo = 1, hi = static_cast<double>(opt.N);
        if (!opt.window.empty())
            std::tie(lo, hi) = parse_window(opt.window);
        if (!(lo >= 1) || !(hi > lo) || hi > static_cast<double>(opt.N))
            throw ConfigError("delta grid must satisfy 1 <= lo < hi <= N");
        const std::uint64_t n = std::max<std::uint64_t>(2, opt.samples);
        std::ostringstream csv;
        csv << "x,delta\n";
        csv.precision(17);
        for (std::uint64_t i = 0; i < n; ++i) {
            const double x = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
            csv << x << "," << delta_at(t, M, x) << "\n";
        }
        const fs::path p = out_dir / ("delta-" + a.label() + ".csv");
        write_text(files, p, csv.str());
        std::cout << json{{"ok", true}, {"file", p.string()}}.dump(2) << "\n";
        return 0;
    }

    if (cmd == "meansquare") {
        DivisorTable t = open_table(a, opt, nullptr);
        MainTerm M = compute_main_term(a, main_term_config(opt));
        MeanSquareConfig cfg;
        cfg.quad_order = opt.quad_order;
        cfg.threads = opt.threads;
        MeanSquareProfile prof = mean_square(t, M, T, cfg);
        PowerLawFit fit = fit_power_law(prof);
        json j = to_json(prof);
        j["schema"] = "divlab/1";
        j["fit"] = to_json(fit);
        write_json(files, out_dir / ("meansquare-" + a.label() + ".json"), j);
        write_text(files, out_dir / ("meansquare-" + a.label() + ".csv"), csv_meansquare(prof));
        write_text(files, out_dir / ("meansquare-" + a.label() + "-loglog.dat"), loglog_data(prof));
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (cmd == "voronoi") {
        DivisorTable t = open_table(a, opt, nullptr);
        MainTerm M = compute_main_term(a, main_term_config(opt));
        double lo = static_cast<double>(opt.N) / 8, hi = static_cast<double>(opt.N) / 4;
        if (!opt.window.empty())
            std::tie(lo, hi) = parse_window(opt.window);
        CalibrationConfig cfg;
        cfg.samples = opt.samples;
        CalibrationResult cal = calibrate(a, t, M, lo, hi, opt.m_prime, cfg);
        json j = to_json(cal);
        j["schema"] = "divlab/1";
        j["window"] = {lo, hi};
        write_json(files, out_dir / ("voronoi-" + a.label() + ".json"), j);

        std::ostringstream csv;
        csv << "y,delta,r1\n";
        csv.precision(17);
        for (double y : sample_points(a, lo, hi, opt.samples)) {
            csv << y << "," << delta_at(t, M, y) << ","
                << eval_truncated(cal.params, t, y) << "\n";
        }
        write_text(files, out_dir / ("voronoi-" + a.label() + "-samples.csv"), csv.str());
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    if (cmd == "report") {
        json j;
        j["schema"] = "divlab/1";
        j["tuple"] = a.values();
        j["exponents"] = exponents_report(a, opt);

        json sieve_meta;
        DivisorTable t = open_table(a, opt, &sieve_meta);
        j["sieve"] = sieve_meta;

        MainTerm M = compute_main_term(a, main_term_config(opt));
        j["main_term"] = to_json(M);

        MeanSquareConfig mcfg;
        mcfg.quad_order = opt.quad_order;
        mcfg.threads = opt.threads;
        MeanSquareProfile prof = mean_square(t, M, T, mcfg);
        PowerLawFit fit = fit_power_law(prof);
        j["meansquare"] = to_json(prof);
        j["meansquare"]["fit"] = to_json(fit);

        json checks;
        const double pred = prof.predicted_exponent;
        checks["slope_within_0.05_of_predicted"] = std::abs(fit.slope - pred) <= 0.05;
        if (prof.predicted_constant) {
            checks["constant_within_10pct"] =
                std::abs(fit.ratio_at_T - *prof.predicted_constant) <=
                0.10 * *prof.predicted_constant;
        }

        double lo = static_cast<double>(opt.N) / 8, hi = static_cast<double>(opt.N) / 4;
        if (!opt.window.empty())
            std::tie(lo, hi) = parse_window(opt.window);
        try {
            CalibrationConfig vcfg;
            vcfg.samples = opt.samples;
            CalibrationResult cal = calibrate(a, t, M, lo, hi, opt.m_prime, vcfg);
            j["voronoi"] = to_json(cal);
            checks["residual_ratio_below_0.2"] = cal.residual_ratio < 0.2;

            // leading-constant consistency: kappa^2/2 * S / (1 + (k-1)/(2a))
            const auto k = static_cast<long long>(a.k());
            const Rational expo = Rational(2) - Rational(k - 1) / (2 * a.alpha());
            if (expo > Rational(2) - Rational(1, a.largest())) {
                SeriesConstant sc = series_constant(t, expo);
                const double shape = 0.5 * cal.params.kappa * cal.params.kappa * sc.value /
                                     prof.predicted_exponent;
                j["k1_shape_constant"] = shape;
                checks["k1_constant_within_25pct"] =
                    std::abs(shape - fit.ratio_at_T) <= 0.25 * fit.ratio_at_T;
            }
        } catch (const NumericError& e) {
            j["voronoi"] = {{"error", e.what()}};
        }

        j["checks"] = checks;
        write_json(files, out_dir / ("report-" + a.label() + ".json"), j);
        std::cout << j.dump(2) << "\n";
        return 0;
    }

    throw ConfigError("unknown command '" + cmd + "'");
}

json error_json(const std::string& type, const std::string& message, int code) {
    return {{"error", {{"type", type}, {"message", message}, {"exit", code}}}};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"divisor-function experiments: sieves, main terms, mean squares"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config")->description("config file with key=value lines");

    Options opt;
    app.add_option("--a", opt.a_csv, "exponent tuple, comma separated")->required();
    app.add_option("--N", opt.N, "sieve limit");
    app.add_option("--T", opt.T, "mean-square upper limit (default: N)");
    app.add_option("--precision", opt.precision, "requested coefficient digits");
    app.add_option("--quad-order", opt.quad_order, "Gauss-Legendre nodes per interval");
    app.add_option("--M-prime", opt.m_prime, "truncation length of the oscillating sum");
    app.add_option("--window", opt.window, "window 'lo:hi' for delta/voronoi");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--cache", opt.cache_dir, "table cache directory");
    app.add_option("--threads", opt.threads, "worker cap for the integrator");
    app.add_flag("--deterministic", opt.deterministic, "omit timestamps from outputs");
    app.add_option("--samples", opt.samples)->group("");
    app.add_option("--memory-budget", opt.memory_budget)->group("");
    app.add_option("--em-terms", opt.em_terms)->group("");
    app.add_option("--bernoulli-pairs", opt.bernoulli_pairs)->group("");

    for (const char* name : {"exponents", "sieve", "main-term", "delta", "meansquare",
                             "voronoi", "report"})
        app.add_subcommand(name);

    std::string cmd;
    try {
        app.parse(argc, argv);
        cmd = app.get_subcommands().front()->get_name();
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << error_json("config", e.what(), 2).dump(2) << "\n";
        return 2;
    }

    FileTracker files;
    try {
        int rc = run(cmd, opt, files);
        files.keep = true;
        return rc;
    } catch (const ConfigError& e) {
        std::cout << error_json("config", e.what(), 2).dump(2) << "\n";
        return 2;
    } catch (const InapplicabilityError& e) {
        std::cout << error_json("inapplicable", e.what(), 3).dump(2) << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cout << error_json("numeric", e.what(), 4).dump(2) << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cout << error_json("internal", e.what(), 4).dump(2) << "\n";
        return 4;
    }
}
