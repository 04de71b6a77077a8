#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cloudmarket/scenario.hpp"
#include "cloudmarket/simulation.hpp"
#include "cloudmarket/summary.hpp"

namespace fs = std::filesystem;
using cloudmarket::parse_scenario;
using cloudmarket::ParseResult;
using cloudmarket::Scenario;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRuntime = 2;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << content;
}

ParseResult load_scenario(const std::string& path) {
    ParseResult result;
    try {
        result = parse_scenario(read_file(path));
    } catch (const std::exception& e) {
        result.errors.push_back(e.what());
    }
    return result;
}

int cmd_validate(const std::string& path) {
    const ParseResult result = load_scenario(path);
    if (!result.ok()) {
        for (const std::string& e : result.errors) {
            std::cerr << "error: " << e << "\n";
        }
        return kExitInvalid;
    }
    std::cout << "ok: " << path << "\n";
    return kExitOk;
}

int cmd_run(const std::string& path, const std::string& out_dir, std::int64_t seed_override,
            int replications_override, int jobs) {
    ParseResult parsed = load_scenario(path);
    if (!parsed.ok()) {
        for (const std::string& e : parsed.errors) {
            std::cerr << "error: " << e << "\n";
        }
        return kExitInvalid;
    }
    Scenario scenario = std::move(*parsed.scenario);
    if (seed_override >= 0) {
        scenario.run.seed = static_cast<std::uint64_t>(seed_override);
    }
    if (replications_override > 0) {
        scenario.run.replications = replications_override;
    }
    try {
        fs::create_directories(out_dir);
        const int replications = scenario.run.replications;
        std::vector<nlohmann::ordered_json> summaries(replications);
        std::vector<std::string> failures(replications);
        std::atomic<int> next{0};
        auto worker = [&] {
            for (int r = next.fetch_add(1); r < replications; r = next.fetch_add(1)) {
                try {
                    // Replication r runs on its own fully isolated instance.
                    const auto result =
                        cloudmarket::run_simulation(scenario, scenario.run.seed + r, r);
                    write_file(fs::path(out_dir) / ("trace_r" + std::to_string(r) + ".csv"),
                               result.trace_csv);
                    summaries[r] = cloudmarket::summary_to_json(result.summary);
                    write_file(fs::path(out_dir) / ("summary_r" + std::to_string(r) + ".json"),
                               summaries[r].dump(2) + "\n");
                } catch (const std::exception& e) {
                    failures[r] = e.what();
                }
            }
        };
        const int threads = std::max(1, std::min(jobs, replications));
        std::vector<std::thread> pool;
        for (int i = 0; i < threads - 1; ++i) {
            pool.emplace_back(worker);
        }
        worker();
        for (std::thread& t : pool) {
            t.join();
        }
        for (int r = 0; r < replications; ++r) {
            if (!failures[r].empty()) {
                std::cerr << "error: replication " << r << ": " << failures[r] << "\n";
                return kExitRuntime;
            }
        }
        const nlohmann::ordered_json aggregate = cloudmarket::aggregate_summaries(summaries);
        write_file(fs::path(out_dir) / "aggregate.json", aggregate.dump(2) + "\n");
        std::cout << "wrote " << replications << " replication(s) to " << out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_report(const std::string& dir, const std::string& format) {
    try {
        std::vector<nlohmann::ordered_json> summaries;
        std::vector<fs::path> files;
        if (fs::exists(dir)) {
            for (const auto& entry : fs::directory_iterator(dir)) {
                const std::string name = entry.path().filename().string();
                if (name.rfind("summary_r", 0) == 0 && entry.path().extension() == ".json") {
                    files.push_back(entry.path());
                }
            }
        }
        std::sort(files.begin(), files.end());
        for (const fs::path& f : files) {
            summaries.push_back(nlohmann::ordered_json::parse(read_file(f)));
        }
        if (summaries.empty()) {
            std::cerr << "error: no summaries found in " << dir << "\n";
            return kExitRuntime;
        }
        const nlohmann::ordered_json aggregate = cloudmarket::aggregate_summaries(summaries);
        if (format == "csv") {
            std::cout << "metric,mean,min,max\n";
            for (const auto& [name, stats] : aggregate.at("metrics").items()) {
                std::cout << name << ',' << stats.at("mean").get<double>() << ','
                          << stats.at("min").get<double>() << ','
                          << stats.at("max").get<double>() << "\n";
            }
        } else {
            std::cout << aggregate.dump(2) << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"market-oriented cloud datacenter simulator"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::string report_dir;
    std::string format = "json";
    std::int64_t seed = -1;
    int replications = 0;
    int jobs = 1;

    CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
    validate->add_option("scenario", scenario_path, "scenario JSON file")->required();

    CLI::App* run = app.add_subcommand("run", "run a scenario");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--seed", seed, "override the base seed");
    run->add_option("--replications", replications, "override the replication count");
    run->add_option("--jobs", jobs, "worker threads for replications")
        ->check(CLI::PositiveNumber);

    CLI::App* report = app.add_subcommand("report", "aggregate run summaries");
    report->add_option("dir", report_dir, "run output directory")->required();
    report->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) {
        return cmd_validate(scenario_path);
    }
    if (run->parsed()) {
        return cmd_run(scenario_path, out_dir, seed, replications, jobs);
    }
    return cmd_report(report_dir, format);
}
