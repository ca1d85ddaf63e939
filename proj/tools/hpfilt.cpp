// hpfilt: trend extraction CLI around the HP filter family.
//
//   hpfilt filter <input.csv> <hp|bhp|ohp|sohp> [--lambda 14400] [--log] ...
//   hpfilt si     <input.csv> [--lambda 14400] [--log] [--max-iter 20]
//   hpfilt bench  [--lengths 250,500,1000,2000] [--repeats 10] [--out r.json]
//
// Exit codes: 0 ok, 1 data/runtime error, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hpfilt/hpfilt.hpp"

namespace {

struct InputOptions {
    std::string path;
    std::string value_col = "Close";
    std::string date_col = "Date";
    bool date_col_user_set = false;
    bool take_log = false;
};

struct LoadedSeries {
    hpfilt::Vector y;
    std::vector<std::string> dates;
};

LoadedSeries load_series(const InputOptions& in) {
    std::vector<hpfilt::SeriesRecord> records;
    if (in.date_col.empty()) {
        records = hpfilt::read_csv(in.path, in.value_col, std::nullopt);
    } else {
        try {
            records = hpfilt::read_csv(in.path, in.value_col, in.date_col);
        } catch (const hpfilt::SchemaError&) {
            if (in.date_col_user_set)
                throw;
            // Default date column is soft: fall back to a dateless read.
            records = hpfilt::read_csv(in.path, in.value_col, std::nullopt);
        }
    }
    LoadedSeries series;
    series.dates = hpfilt::dates(records);
    series.y = in.take_log ? hpfilt::log_transform(records)
                           : hpfilt::values(records);
    return series;
}

void add_input_options(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("input", in.path, "CSV file with a header row")
        ->required();
    cmd->add_option("--value-col", in.value_col,
                    "column holding the series values")
        ->capture_default_str();
    cmd->add_option("--date-col", in.date_col,
                    "date column; pass an empty string to disable")
        ->capture_default_str();
    cmd->add_flag("--log", in.take_log,
                  "filter the natural log of the values");
}

hpfilt::OutputFormat parse_format(const std::string& format) {
    return format == "json" ? hpfilt::OutputFormat::Json
                            : hpfilt::OutputFormat::Csv;
}

void print_stats(std::FILE* out, const hpfilt::Vector& cycle) {
    const double n = static_cast<double>(cycle.size());
    const double mean = cycle.mean();
    double ss = 0.0;
    for (hpfilt::Index i = 0; i < cycle.size(); ++i)
        ss += (cycle[i] - mean) * (cycle[i] - mean);
    std::fprintf(out, "cycle mean = %.6e\n", mean);
    std::fprintf(out, "cycle variance (population) = %.6e\n", ss / n);
    if (cycle.size() > 1)
        std::fprintf(out, "cycle variance (sample) = %.6e\n", ss / (n - 1.0));
}

std::uint64_t bench_seed_from_env() {
    const char* raw = std::getenv("HPFILT_SEED");
    if (raw == nullptr)
        return hpfilt::kDefaultBenchSeed;
    char* end = nullptr;
    errno = 0;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0')
        throw CLI::ValidationError(
            "HPFILT_SEED must be a decimal integer, got '" +
            std::string(raw) + "'");
    return value;
}

void run_filter(const InputOptions& in, const std::string& method,
                double lambda, int bhp_n, bool bhp_n_set, int max_iter,
                const std::string& out_path, const std::string& format) {
    const LoadedSeries series = load_series(in);
    const hpfilt::OutputFormat fmt = parse_format(format);

    std::string summary;
    char buf[160];

    auto emit = [&](const auto& result) {
        if (out_path.empty() || out_path == "-") {
            hpfilt::write_decomposition(result, fmt, std::cout, series.dates);
            std::fputs(summary.c_str(), stderr);
        } else {
            hpfilt::write_decomposition(
                result, fmt, std::filesystem::path(out_path), series.dates);
            std::fputs(summary.c_str(), stdout);
        }
    };

    if (method == "sohp") {
        hpfilt::FilterConfig cfg;
        cfg.smoothing = lambda;
        cfg.max_iterations = max_iter;
        const hpfilt::SohpResult res = hpfilt::sohp(series.y, cfg);
        if (res.degenerate)
            std::snprintf(buf, sizeof buf,
                          "l=%lld method=sohp lambda=%g n=1 degenerate=true\n",
                          static_cast<long long>(series.y.size()), lambda);
        else
            std::snprintf(
                buf, sizeof buf, "l=%lld method=sohp lambda=%g n=%d SI=%.4f\n",
                static_cast<long long>(series.y.size()), lambda, res.chosen_n,
                res.si_values[static_cast<std::size_t>(res.chosen_n - 1)]);
        summary = buf;
        emit(res);
        return;
    }

    hpfilt::Decomposition dec;
    if (method == "hp") {
        dec = hpfilt::hp_direct(series.y, lambda);
    } else if (method == "bhp") {
        dec = hpfilt::bhp(series.y, lambda, bhp_n);
    } else {  // ohp
        hpfilt::Vector trend = hpfilt::ohp(series.y, lambda);
        hpfilt::Vector cycle = series.y - trend;
        dec = hpfilt::Decomposition{series.y, std::move(trend),
                                    std::move(cycle)};
    }
    if (method == "bhp")
        std::snprintf(buf, sizeof buf, "l=%lld method=bhp lambda=%g n=%d\n",
                      static_cast<long long>(series.y.size()), lambda, bhp_n);
    else
        std::snprintf(buf, sizeof buf, "l=%lld method=%s lambda=%g\n",
                      static_cast<long long>(series.y.size()), method.c_str(),
                      lambda);
    summary = buf;
    emit(dec);
    (void)bhp_n_set;
}

void run_si(const InputOptions& in, double lambda, int max_iter) {
    const LoadedSeries series = load_series(in);
    hpfilt::FilterConfig cfg;
    cfg.smoothing = lambda;
    cfg.max_iterations = max_iter;
    const hpfilt::SohpResult res = hpfilt::sohp(series.y, cfg);

    std::printf("l=%lld lambda=%g\n",
                static_cast<long long>(series.y.size()), lambda);
    if (res.degenerate) {
        std::printf("first-stage cycle has ~zero l1 norm: series is perfectly "
                    "trended (degenerate), stopping at n=1\n");
        print_stats(stdout, res.final_cycle);
        return;
    }
    std::printf("%4s  %-12s\n", "n", "SI(n)");
    for (std::size_t i = 0; i < res.si_values.size(); ++i)
        std::printf("%4zu  %-12.6f%s\n", i + 1, res.si_values[i],
                    static_cast<int>(i + 1) == res.chosen_n ? "  <- min" : "");
    std::printf("chosen n = %d, SI = %.4f\n", res.chosen_n,
                res.si_values[static_cast<std::size_t>(res.chosen_n - 1)]);
    print_stats(stdout, res.final_cycle);
}

void run_bench(const std::vector<long long>& lengths, int repeats,
               const std::string& out_path, const std::string& format) {
    hpfilt::BenchConfig cfg;
    if (!lengths.empty()) {
        cfg.lengths.clear();
        for (long long l : lengths)
            cfg.lengths.push_back(static_cast<hpfilt::Index>(l));
    }
    cfg.repeats = repeats;
    cfg.seed = bench_seed_from_env();

    const hpfilt::BenchReport report = hpfilt::run_bench(cfg);

    std::printf("%8s  %16s  %16s\n", "length", "direct [s]", "incremental [s]");
    for (std::size_t i = 0; i < report.lengths.size(); ++i)
        std::printf("%8lld  %16.6e  %16.6e\n",
                    static_cast<long long>(report.lengths[i]),
                    report.direct_seconds[i], report.incremental_seconds[i]);
    std::printf("log-log slope: direct = %.3f, incremental = %.3f\n",
                report.direct_slope, report.incremental_slope);
    std::printf("repeats = %d (plus one warm-up), seed = %llu\n",
                report.repeats,
                static_cast<unsigned long long>(report.seed));

    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw hpfilt::IoError("cannot open '" + out_path +
                                  "' for writing");
        if (parse_format(format) == hpfilt::OutputFormat::Json)
            out << hpfilt::to_json(report).dump(2) << '\n';
        else
            hpfilt::write_report_csv(report, out);
        if (!out)
            throw hpfilt::IoError("write to '" + out_path + "' failed");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hodrick-Prescott trend extraction: direct, boosted, "
                 "one-sided, and successive one-sided filters with an "
                 "incremental expanding-horizon solver"};
    app.require_subcommand(1);

    // filter
    InputOptions filter_in;
    std::string method;
    double lambda = 14400.0;
    int bhp_n = 0;
    int max_iter = 20;
    std::string out_path;
    std::string format = "csv";
    CLI::App* filter = app.add_subcommand(
        "filter", "decompose a series into trend and cycle");
    add_input_options(filter, filter_in);
    filter->add_option("method", method, "one of hp, bhp, ohp, sohp")
        ->required()
        ->check(CLI::IsMember({"hp", "bhp", "ohp", "sohp"}));
    filter->add_option("--lambda", lambda, "smoothing weight")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    CLI::Option* n_opt =
        filter->add_option("--n", bhp_n, "boosting iterations (bhp only)")
            ->check(CLI::PositiveNumber);
    filter->add_option("--max-iter", max_iter, "stage cap for sohp")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    filter->add_option("--out", out_path,
                       "output file; '-' or empty writes to stdout");
    filter->add_option("--format", format, "output format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    filter->callback([&] {
        filter_in.date_col_user_set =
            filter->get_option("--date-col")->count() > 0;
        const bool n_set = n_opt->count() > 0;
        if (method == "bhp" && !n_set)
            throw CLI::ValidationError("--n is required with method bhp");
        if (method != "bhp" && n_set)
            throw CLI::ValidationError("--n is only valid with method bhp");
        run_filter(filter_in, method, lambda, bhp_n, n_set, max_iter,
                   out_path, format);
    });

    // si
    InputOptions si_in;
    double si_lambda = 14400.0;
    int si_max_iter = 20;
    CLI::App* si = app.add_subcommand(
        "si", "probe the successive filter's stopping index");
    add_input_options(si, si_in);
    si->add_option("--lambda", si_lambda, "smoothing weight")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    si->add_option("--max-iter", si_max_iter, "largest stage count probed")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    si->callback([&] {
        si_in.date_col_user_set = si->get_option("--date-col")->count() > 0;
        run_si(si_in, si_lambda, si_max_iter);
    });

    // bench
    std::vector<long long> bench_lengths;
    int bench_repeats = 10;
    std::string bench_out;
    std::string bench_format = "json";
    CLI::App* bench = app.add_subcommand(
        "bench", "time the dense direct solve against the incremental pass");
    bench
        ->add_option("--lengths", bench_lengths,
                     "series lengths (default 250,500,1000,2000)")
        ->delimiter(',')
        ->check(CLI::Range(3LL, 1000000LL));
    bench->add_option("--repeats", bench_repeats, "timed repeats per length")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_out, "write the report to this file");
    bench->add_option("--format", bench_format, "report format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    bench->callback(
        [&] { run_bench(bench_lengths, bench_repeats, bench_out, bench_format); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const hpfilt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
