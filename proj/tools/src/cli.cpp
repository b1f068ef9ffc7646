// Copyright 2026 The AQUA Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <future>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

#include "aqua/aqua.hpp"
#include "aqua/attention.hpp"
#include "aqua/calibration.hpp"
#include "aqua/costmodel.hpp"
#include "aqua/error.hpp"
#include "aqua/h2o.hpp"
#include "aqua/metrics.hpp"
#include "aqua/synth.hpp"
#include "aqua/wire.hpp"
#include "csv.hpp"
#include "manifest.hpp"

namespace aqua::cli {

namespace {

// ---------------------------------------------------------------- calibrate

struct CalibrateOptions {
    std::string source = "toy";
    std::string dump_path;
    std::uint64_t seed = 0;
    std::size_t m_per_source = 4096;
    std::size_t layers = 1;
    std::size_t groups = 1;
    std::size_t nq = 1;
    std::size_t d_head = 128;
    double decay = 0.85;
    std::string out;
};

void cmd_calibrate(const CalibrateOptions& opt) {
    RunManifest manifest;
    manifest.command = "calibrate";
    manifest.config = {
        {"source", opt.source},
        {"seed", std::to_string(opt.seed)},
        {"m_per_source", std::to_string(opt.m_per_source)},
        {"layers", std::to_string(opt.layers)},
        {"groups", std::to_string(opt.groups)},
        {"nq", std::to_string(opt.nq)},
        {"d_head", std::to_string(opt.d_head)},
        {"decay", format_double(opt.decay)},
        {"out", opt.out},
    };

    std::vector<ActivationRecord> records;
    std::size_t d_head = opt.d_head;
    std::size_t layers = opt.layers;
    std::size_t groups = opt.groups;
    std::size_t nq = opt.nq;
    std::uint64_t fingerprint = 0;

    if (opt.source == "toy") {
        const ToyHeadSpec spec{opt.seed,
                               HeadConfig{d_head, d_head, nq},
                               opt.decay,
                               layers,
                               groups};
        // oversample so the reservoirs genuinely subsample
        records = generate_stream(spec, 2 * opt.m_per_source);
        fingerprint = stream_fingerprint(spec);
    } else {
        manifest.inputs.push_back(opt.dump_path);
        manifest.config["dump_path"] = opt.dump_path;
        ActivationDump dump = read_dump(opt.dump_path);
        d_head = dump.header.d_head;
        layers = dump.header.n_layers;
        groups = dump.header.n_groups;
        nq = dump.header.n_q_heads;
        fingerprint = dump_fingerprint(dump.header, dump.records.size());
        records = std::move(dump.records);
    }

    // Entries are independent; compute them in parallel and let the
    // ordered map fix the output order.
    struct Task {
        std::uint32_t layer;
        std::uint32_t group;
        std::future<CalibrationResult> result;
    };
    std::vector<Task> tasks;
    for (std::uint32_t layer = 0; layer < layers; ++layer) {
        for (std::uint32_t group = 0; group < groups; ++group) {
            tasks.push_back(Task{layer, group,
                                 std::async(std::launch::async, [&, layer, group] {
                                     return calibrate(build_calibration_matrix(
                                         records, layer, group, opt.m_per_source, opt.seed, nq));
                                 })});
        }
    }

    ProjectionBundle bundle;
    bundle.d_head = static_cast<std::uint32_t>(d_head);
    std::size_t rank_deficient = 0;
    for (Task& task : tasks) {
        CalibrationResult result = task.result.get();
        if (result.rank_deficient) {
            ++rank_deficient;
            std::cerr << "warning: entry (" << task.layer << ", " << task.group
                      << ") calibrated from fewer rows than d_head\n";
        }
        bundle.entries[{task.layer, task.group}] =
            BundleEntry{std::move(result.projection), std::move(result.sigma),
                        static_cast<std::uint32_t>(opt.m_per_source), fingerprint};
    }

    save_bundle(bundle, opt.out);
    manifest.notes["calibration_rows_per_entry"] = std::to_string((nq + 1) * opt.m_per_source);
    manifest.notes["entries"] = std::to_string(bundle.entries.size());
    manifest.notes["rank_deficient_entries"] = std::to_string(rank_deficient);
    manifest.notes["source_fingerprint"] = to_hex(fingerprint);
    manifest.add_output_checksum(opt.out);
    manifest.write(opt.out);
}

// ------------------------------------------------------------------- attend

struct AttendOptions {
    std::string bundle_path;
    std::string mode;
    double k_ratio = 1.0;
    double s_ratio = 0.0;
    double h2o_ratio = 1.0;
    double recent_fraction = 0.5;
    std::string scale = "d";
    std::string selection = "mag";
    std::size_t steps = 512;
    std::uint64_t seed = 1;
    std::uint32_t layer = 0;
    std::uint32_t group = 0;
    std::size_t nq = 1;
    double decay = 0.85;
    bool exact_accumulation = false;
    std::string out_csv;
};

std::string join_indices(std::span<const std::size_t> indices) {
    std::string out;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i > 0) {
            out += ';';
        }
        out += std::to_string(indices[i]);
    }
    return out;
}

void cmd_attend(const AttendOptions& opt) {
    if (opt.mode == "aqua-memory") {
        if (!(opt.s_ratio > 0.0)) {
            throw ParameterError("mode aqua-memory requires --s-ratio > 0");
        }
    } else if (opt.s_ratio != 0.0) {
        throw ParameterError("--s-ratio is only meaningful with --mode aqua-memory");
    }

    const ProjectionBundle bundle = load_bundle(opt.bundle_path);
    const auto entry = bundle.entries.find({opt.layer, opt.group});
    if (entry == bundle.entries.end()) {
        throw ParameterError("bundle has no entry for layer " + std::to_string(opt.layer) +
                             " group " + std::to_string(opt.group));
    }
    const std::size_t d = bundle.d_head;

    AquaConfig config;
    config.k_ratio = opt.k_ratio;
    config.s_ratio = opt.s_ratio;
    config.scale_mode = (opt.scale == "k") ? ScaleMode::SqrtK : ScaleMode::SqrtDHead;
    config.selection =
        (opt.selection == "slice") ? SelectionMode::FirstKSlice : SelectionMode::Magnitude;
    config.validate();

    RunManifest manifest;
    manifest.command = "attend";
    manifest.config = {
        {"bundle", opt.bundle_path},
        {"mode", opt.mode},
        {"k_ratio", format_double(opt.k_ratio)},
        {"s_ratio", format_double(opt.s_ratio)},
        {"h2o_ratio", format_double(opt.h2o_ratio)},
        {"recent_fraction", format_double(opt.recent_fraction)},
        {"scale", opt.scale},
        {"selection", opt.selection},
        {"steps", std::to_string(opt.steps)},
        {"seed", std::to_string(opt.seed)},
        {"layer", std::to_string(opt.layer)},
        {"group", std::to_string(opt.group)},
        {"nq", std::to_string(opt.nq)},
        {"decay", format_double(opt.decay)},
        {"exact_accumulation", opt.exact_accumulation ? "true" : "false"},
        {"out_csv", opt.out_csv},
    };
    manifest.inputs.push_back(opt.bundle_path);

    const ToyHeadSpec spec{opt.seed,
                           HeadConfig{d, d, opt.nq},
                           opt.decay,
                           static_cast<std::size_t>(opt.layer) + 1,
                           static_cast<std::size_t>(opt.group) + 1};
    ToyStream stream(spec);

    manifest.notes["stream_fingerprint"] = to_hex(stream_fingerprint(spec));
    manifest.notes["bundle_fingerprint"] = to_hex(entry->second.source_fingerprint);
    manifest.notes["fingerprint_match"] =
        (entry->second.source_fingerprint == stream_fingerprint(spec)) ? "true" : "false";
    if (opt.mode != "exact") {
        manifest.notes["e_ratio"] = format_fixed3(effective_ratio(config));
        manifest.notes["e_ratio_exact"] = format_double(effective_ratio(config));
        manifest.notes["k_dims"] = std::to_string(config.top_k(d));
        manifest.notes["effective_dim"] = std::to_string(config.effective_dim(d));
    }

    CsvWriter csv(manifest.digest(),
                  {"step", "selected_indices", "max_abs_score_error_vs_exact",
                   "weight_l1_error_vs_exact", "live_token_count", "macs_std", "macs_aqua"});

    const bool hybrid = (opt.mode == "aqua-h2o");
    const bool approximate = (opt.mode != "exact");

    KVCache reference(d);
    MacCounter std_counter;
    MacCounter aqua_counter;
    ProjectedKVCache cache(d, config.effective_dim(d));
    H2OState state(H2OConfig{opt.h2o_ratio, opt.recent_fraction, opt.exact_accumulation});

    std::vector<ActivationRecord> token;
    for (std::size_t step = 0; step < opt.steps; ++step) {
        token.clear();
        stream.next_token(token);
        const std::vector<double>* q = nullptr;
        const std::vector<double>* k = nullptr;
        const std::vector<double>* v = nullptr;
        for (const ActivationRecord& rec : token) {
            if (rec.layer != opt.layer || rec.group != opt.group) {
                continue;
            }
            if (rec.kind == ActivationKind::Query && rec.head == 0) {
                q = &rec.data;
            } else if (rec.kind == ActivationKind::Key) {
                k = &rec.data;
            } else if (rec.kind == ActivationKind::Value) {
                v = &rec.data;
            }
        }

        if (q == nullptr || k == nullptr || v == nullptr) {
            throw NumericError("toy stream produced no records for the requested head");
        }

        const std::uint64_t std_before = std_counter.total_macs();
        reference.append(*k, *v);
        const AttentionStep exact = attend_exact(*q, reference, &std_counter);
        const std::uint64_t macs_std = std_counter.total_macs() - std_before;

        std::string selected_cell;
        double score_error = 0.0;
        double weight_l1 = 0.0;
        std::size_t live_count = step + 1;
        std::uint64_t macs_aqua = 0;

        if (approximate) {
            const std::uint64_t aqua_before = aqua_counter.total_macs();
            std::vector<double> scores;
            std::vector<double> weights;
            std::vector<std::size_t> selected;
            std::vector<std::uint64_t> ids;  // token id per score entry

            if (hybrid) {
                for (std::uint64_t id : state.live_ids()) {
                    ids.push_back(id);
                }
                ids.push_back(step);
                HybridStepResult result = aqua_h2o_step(*q, *k, *v, cache, entry->second.projection,
                                                        config, state, &aqua_counter);
                scores = std::move(result.scores);
                weights = std::move(result.weights);
                selected = std::move(result.selected);
                live_count = state.live_ids().size();
            } else {
                AquaStepResult result =
                    aqua_step(*q, *k, cache, entry->second.projection, config, &aqua_counter);
                cache.append_value(*v);
                scores = std::move(result.scores);
                selected = std::move(result.selected);
                weights = aqua_weights(scores, config, d);
                ids.resize(scores.size());
                std::iota(ids.begin(), ids.end(), 0);
            }
            macs_aqua = aqua_counter.total_macs() - aqua_before;

            for (std::size_t pos = 0; pos < scores.size(); ++pos) {
                score_error = std::max(
                    score_error, std::abs(scores[pos] - exact.scores[ids[pos]]));
            }
            std::vector<double> weight_by_id(step + 1, 0.0);
            for (std::size_t pos = 0; pos < weights.size(); ++pos) {
                weight_by_id[ids[pos]] = weights[pos];
            }
            for (std::size_t id = 0; id <= step; ++id) {
                weight_l1 += std::abs(weight_by_id[id] - exact.weights[id]);
            }
            selected_cell = join_indices(selected);
        }

        csv.row({format_u64(step + 1), selected_cell, format_double(score_error),
                 format_double(weight_l1), format_u64(live_count), format_u64(macs_std),
                 format_u64(macs_aqua)});
    }

    csv.write(opt.out_csv);
    manifest.add_output_checksum(opt.out_csv);
    manifest.write(opt.out_csv);
}

// ------------------------------------------------------------------ analyze

struct AnalyzeOptions {
    std::string bundle_path;
    std::string metric;
    std::uint64_t calib_seed = 0;
    std::uint64_t eval_seed = 1;
    std::vector<std::size_t> ks;
    std::vector<std::size_t> kprimes;
    std::size_t samples = 512;
    std::size_t nq = 1;
    double decay = 0.85;
    bool projected_magnitude = false;
    std::string out_csv;
};

void cmd_analyze(const AnalyzeOptions& opt) {
    const ProjectionBundle bundle = load_bundle(opt.bundle_path);
    if (bundle.entries.empty()) {
        throw FormatError("bundle has no entries");
    }
    std::size_t layers = 0;
    std::size_t groups = 0;
    for (const auto& [key, entry] : bundle.entries) {
        layers = std::max<std::size_t>(layers, key.first + 1);
        groups = std::max<std::size_t>(groups, key.second + 1);
    }

    RunManifest manifest;
    manifest.command = "analyze";
    manifest.config = {
        {"bundle", opt.bundle_path},
        {"metric", opt.metric},
        {"calib_seed", std::to_string(opt.calib_seed)},
        {"eval_seed", std::to_string(opt.eval_seed)},
        {"ks", join_indices(opt.ks)},
        {"kprimes", join_indices(opt.kprimes)},
        {"samples", std::to_string(opt.samples)},
        {"nq", std::to_string(opt.nq)},
        {"decay", format_double(opt.decay)},
        {"projected_magnitude", opt.projected_magnitude ? "true" : "false"},
        {"out_csv", opt.out_csv},
    };
    manifest.inputs.push_back(opt.bundle_path);

    const ToyHeadSpec calib_spec{opt.calib_seed, HeadConfig{bundle.d_head, bundle.d_head, opt.nq},
                                 opt.decay, layers, groups};
    const ToyHeadSpec eval_spec{opt.eval_seed, HeadConfig{bundle.d_head, bundle.d_head, opt.nq},
                                opt.decay, layers, groups};
    const std::vector<ActivationRecord> stream_a = generate_stream(calib_spec, opt.samples);
    const std::vector<ActivationRecord> stream_b = generate_stream(eval_spec, opt.samples);

    if (opt.metric == "infoloss") {
        const SelectionMode modes[] = {SelectionMode::Magnitude, SelectionMode::FirstKSlice};
        const std::vector<DistributionRow> rows =
            compare_distributions(bundle, stream_a, stream_b, opt.ks, modes);
        CsvWriter csv(manifest.digest(),
                      {"stream", "k", "mode", "source", "mean_loss", "std_error", "n"});
        for (const DistributionRow& row : rows) {
            csv.row({row.stream, format_u64(row.k), selection_mode_name(row.mode), row.source,
                     format_double(row.mean_loss), format_double(row.std_error),
                     format_u64(row.n)});
        }
        csv.write(opt.out_csv);
    } else {
        const std::vector<std::size_t>& kprimes = opt.kprimes.empty() ? opt.ks : opt.kprimes;
        struct Cell {
            double sum = 0.0;
            double sum_sq = 0.0;
            std::size_t n = 0;
        };
        std::map<std::tuple<std::string, std::size_t, std::size_t, std::string>, Cell> cells;
        const auto feed = [&](std::span<const ActivationRecord> stream, const std::string& label) {
            for (const ActivationRecord& rec : stream) {
                if (rec.kind == ActivationKind::Value) {
                    continue;
                }
                const auto it = bundle.entries.find({rec.layer, rec.group});
                if (it == bundle.entries.end()) {
                    continue;
                }
                std::vector<double> v = rec.data;
                if (opt.projected_magnitude) {
                    v = vecmat(v, it->second.projection);
                }
                const std::string source =
                    rec.kind == ActivationKind::Key ? "key" : ("q" + std::to_string(rec.head));
                for (std::size_t k : opt.ks) {
                    for (std::size_t kp : kprimes) {
                        const OverlapSample sample = overlap_rho(v, k, kp);
                        Cell& cell = cells[{label, k, kp, source}];
                        cell.sum += sample.rho;
                        cell.sum_sq += sample.rho * sample.rho;
                        ++cell.n;
                    }
                }
            }
        };
        feed(stream_a, "calib");
        feed(stream_b, "eval");

        CsvWriter csv(manifest.digest(),
                      {"stream", "k", "k_prime", "source", "mean_rho", "std_error", "n"});
        for (const auto& [key, cell] : cells) {
            const double mean = cell.sum / static_cast<double>(cell.n);
            double se = 0.0;
            if (cell.n > 1) {
                const double var =
                    std::max(0.0, (cell.sum_sq - static_cast<double>(cell.n) * mean * mean) /
                                      static_cast<double>(cell.n - 1));
                se = std::sqrt(var / static_cast<double>(cell.n));
            }
            csv.row({std::get<0>(key), format_u64(std::get<1>(key)), format_u64(std::get<2>(key)),
                     std::get<3>(key), format_double(mean), format_double(se),
                     format_u64(cell.n)});
        }
        csv.write(opt.out_csv);
    }

    manifest.add_output_checksum(opt.out_csv);
    manifest.write(opt.out_csv);
}

// -------------------------------------------------------------------- bench

struct BenchOptions {
    std::size_t d_head = 128;
    std::vector<std::size_t> k_grid;
    std::size_t steps = 4096;
    std::string out_csv;
};

std::string threshold_cell(const std::optional<std::uint64_t>& t) {
    return t ? format_u64(*t) : "inf";
}

void cmd_bench(const BenchOptions& opt) {
    RunManifest manifest;
    manifest.command = "bench";
    manifest.config = {
        {"d_head", std::to_string(opt.d_head)},
        {"k_grid", join_indices(opt.k_grid)},
        {"steps", std::to_string(opt.steps)},
        {"out_csv", opt.out_csv},
    };

    CsvWriter csv(manifest.digest(),
                  {"d_head", "k", "n_steps", "macs_std", "macs_aqua_fixed", "macs_aqua_variable",
                   "macs_aqua_total", "analytic_boundary", "analytic_threshold",
                   "counted_step_threshold", "counted_cumulative_threshold", "svd_macs",
                   "svd_path"});
    for (std::size_t k : opt.k_grid) {
        const CostReport report = count_decode(opt.d_head, k, opt.steps);
        const SvdCost svd = svd_cost(opt.steps, opt.d_head);
        const std::string boundary = std::isinf(report.analytic.boundary)
                                         ? "inf"
                                         : format_double(report.analytic.boundary);
        csv.row({format_u64(report.d_head), format_u64(report.k), format_u64(report.n_steps),
                 format_u64(report.macs_std), format_u64(report.macs_aqua_fixed),
                 format_u64(report.macs_aqua_variable),
                 format_u64(report.macs_aqua_fixed + report.macs_aqua_variable), boundary,
                 threshold_cell(report.analytic.first_win),
                 threshold_cell(report.counted_step_threshold),
                 threshold_cell(report.counted_cumulative_threshold), format_u64(svd.macs),
                 std::to_string(svd.chosen_path)});
    }
    csv.write(opt.out_csv);
    manifest.add_output_checksum(opt.out_csv);
    manifest.write(opt.out_csv);
}

// Flat key=value config support: `--config <path>` is replaced by one
// `--key=value` per line, except for flags already given explicitly.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) {
                throw ParameterError("--config requires a path");
            }
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            break;
        }
        if (args[i].starts_with("--config=")) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    const auto bytes = wire::read_file(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParameterError("config line is not key=value: " + line);
        }
        const std::string flag = "--" + line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        bool given = false;
        for (const std::string& arg : args) {
            if (arg == flag || arg.starts_with(flag + "=")) {
                given = true;
                break;
            }
        }
        if (!given) {
            args.push_back(flag + "=" + value);
        }
    }
    return args;
}

}  // namespace

int run(std::vector<std::string> raw_args) {
    CLI::App app{"AQUA: magnitude-selected sparse attention toolkit"};
    app.require_subcommand(1);

    CalibrateOptions cal;
    CLI::App* calibrate_cmd =
        app.add_subcommand("calibrate", "Calibrate projection bundles from an activation stream");
    calibrate_cmd->add_option("--source", cal.source)
        ->check(CLI::IsMember({"toy", "dump"}))
        ->capture_default_str();
    calibrate_cmd->add_option("--dump-path", cal.dump_path, "AQAC file when --source dump");
    calibrate_cmd->add_option("--seed", cal.seed)->capture_default_str();
    calibrate_cmd->add_option("--m-per-source", cal.m_per_source)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    calibrate_cmd->add_option("--layers", cal.layers)->check(CLI::PositiveNumber)
        ->capture_default_str();
    calibrate_cmd->add_option("--groups", cal.groups)->check(CLI::PositiveNumber)
        ->capture_default_str();
    calibrate_cmd->add_option("--nq", cal.nq, "query heads per group")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    calibrate_cmd->add_option("--d-head", cal.d_head)->check(CLI::PositiveNumber)
        ->capture_default_str();
    calibrate_cmd->add_option("--decay", cal.decay, "toy spectrum decay")
        ->capture_default_str();
    calibrate_cmd->add_option("--out", cal.out, "output bundle path")->required();

    AttendOptions att;
    CLI::App* attend_cmd =
        app.add_subcommand("attend", "Simulate auto-regressive decoding against the exact path");
    attend_cmd->add_option("--bundle", att.bundle_path)->required();
    attend_cmd->add_option("--mode", att.mode)
        ->check(CLI::IsMember({"exact", "aqua", "aqua-h2o", "aqua-memory"}))
        ->required();
    attend_cmd->add_option("--k-ratio", att.k_ratio)->capture_default_str();
    attend_cmd->add_option("--s-ratio", att.s_ratio)->capture_default_str();
    attend_cmd->add_option("--h2o-ratio", att.h2o_ratio)->capture_default_str();
    attend_cmd->add_option("--recent-fraction", att.recent_fraction)->capture_default_str();
    attend_cmd->add_option("--scale", att.scale)->check(CLI::IsMember({"d", "k"}))
        ->capture_default_str();
    attend_cmd->add_option("--selection", att.selection)
        ->check(CLI::IsMember({"mag", "slice"}))
        ->capture_default_str();
    attend_cmd->add_option("--steps", att.steps)->check(CLI::PositiveNumber)
        ->capture_default_str();
    attend_cmd->add_option("--seed", att.seed)->capture_default_str();
    attend_cmd->add_option("--layer", att.layer)->capture_default_str();
    attend_cmd->add_option("--group", att.group)->capture_default_str();
    attend_cmd->add_option("--nq", att.nq)->check(CLI::PositiveNumber)->capture_default_str();
    attend_cmd->add_option("--decay", att.decay)->capture_default_str();
    attend_cmd->add_flag("--exact-accumulation", att.exact_accumulation,
                         "accumulate eviction scores from full-coordinate weights");
    attend_cmd->add_option("--out-csv", att.out_csv)->required();

    AnalyzeOptions ana;
    CLI::App* analyze_cmd =
        app.add_subcommand("analyze", "Information-retention and overlap metrics");
    analyze_cmd->add_option("--bundle", ana.bundle_path)->required();
    analyze_cmd->add_option("--metric", ana.metric)
        ->check(CLI::IsMember({"infoloss", "overlap"}))
        ->required();
    analyze_cmd->add_option("--calib-seed", ana.calib_seed)->capture_default_str();
    analyze_cmd->add_option("--eval-seed", ana.eval_seed)->capture_default_str();
    analyze_cmd->add_option("--ks", ana.ks, "retained-dimension grid")
        ->required()
        ->delimiter(',');
    analyze_cmd->add_option("--kprimes", ana.kprimes, "variance-rank grid (overlap)")
        ->delimiter(',');
    analyze_cmd->add_option("--samples", ana.samples, "tokens per stream")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    analyze_cmd->add_option("--nq", ana.nq)->check(CLI::PositiveNumber)->capture_default_str();
    analyze_cmd->add_option("--decay", ana.decay)->capture_default_str();
    analyze_cmd->add_flag("--projected-magnitude", ana.projected_magnitude,
                          "rank magnitudes after projection instead of before");
    analyze_cmd->add_option("--out-csv", ana.out_csv)->required();

    BenchOptions ben;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Cost-model tables");
    bench_cmd->add_option("--d-head", ben.d_head)->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--k-grid", ben.k_grid)->required()->delimiter(',');
    bench_cmd->add_option("--steps", ben.steps)->check(CLI::PositiveNumber)
        ->capture_default_str();
    bench_cmd->add_option("--out-csv", ben.out_csv)->required();

    std::vector<std::string> args;
    try {
        args = expand_config(std::move(raw_args));
    } catch (const IoError& e) {
        std::cerr << "E_IO " << e.what() << "\n";
        return 3;
    } catch (const ParameterError& e) {
        std::cerr << "E_FLAGS " << e.what() << "\n";
        return 2;
    }

    std::vector<const char*> argv;
    argv.push_back("aqua");
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "E_FLAGS " << e.what() << "\n";
        return 2;
    }

    try {
        if (calibrate_cmd->parsed()) {
            if (cal.source == "dump" && cal.dump_path.empty()) {
                throw ParameterError("--source dump requires --dump-path");
            }
            cmd_calibrate(cal);
        } else if (attend_cmd->parsed()) {
            cmd_attend(att);
        } else if (analyze_cmd->parsed()) {
            cmd_analyze(ana);
        } else if (bench_cmd->parsed()) {
            cmd_bench(ben);
        }
        return 0;
    } catch (const NumericError& e) {
        std::cerr << "E_NUMERIC " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        std::cerr << "E_IO " << e.what() << "\n";
        return 3;
    } catch (const FormatError& e) {
        std::cerr << "E_IO " << e.what() << "\n";
        return 3;
    } catch (const IntegrityError& e) {
        std::cerr << "E_IO " << e.what() << "\n";
        return 3;
    } catch (const CapacityError& e) {
        std::cerr << "E_IO " << e.what() << "\n";
        return 3;
    } catch (const ParameterError& e) {
        std::cerr << "E_FLAGS " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "E_FLAGS " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "E_NUMERIC " << e.what() << "\n";
        return 4;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        args.emplace_back(argv[i]);
    }
    return run(std::move(args));
}

}  // namespace aqua::cli
