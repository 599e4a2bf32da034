// Command-line front end: sublift <command> [--config path] [--key value ...]

#include <omp.h>

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sublift/config.hpp"
#include "sublift/experiments.hpp"
#include "sublift/image_io.hpp"
#include "sublift/selftest.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kNotConverged = 3, kSelftest = 4 };

sublift::Config overrides_from(const std::vector<std::string>& extras) {
    sublift::Config cfg;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& item = extras[i];
        if (item.rfind("--", 0) != 0 || item.size() < 3) {
            throw sublift::ConfigError("unexpected argument '" + item + "'");
        }
        const std::string body = item.substr(2);
        const auto eq = body.find('=');
        if (eq != std::string::npos) {
            cfg.set(body.substr(0, eq), body.substr(eq + 1));
        } else if (i + 1 < extras.size()) {
            cfg.set(body, extras[++i]);
        } else {
            throw sublift::ConfigError("missing value for --" + body);
        }
    }
    return cfg;
}

int print_info() {
    std::cout << "sublift 1.0\n"
              << "dual modes: linear (sublabel-accurate), constant (classical baseline)\n"
              << "openmp threads: " << omp_get_max_threads() << "\n"
              << "commands: convex-exact, denoise, ramp-bias, selftest, info\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sublabel-accurate functional lifting solver"};
    app.require_subcommand(1);
    std::string config_path;
    auto add_command = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "key = value settings file");
        sub->allow_extras();
        return sub;
    };
    auto* convex = add_command("convex-exact", "lifted vs direct solve of a convex quadratic problem");
    auto* denoise = add_command("denoise", "channel-separable Mumford-Shah denoising");
    auto* ramp = add_command("ramp-bias", "label bias on a clean ramp");
    auto* selftest = app.add_subcommand("selftest", "property suites of the discretization");
    auto* info = app.add_subcommand("info", "build information");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (info->parsed()) {
            return print_info();
        }
        if (selftest->parsed()) {
            const auto results = sublift::run_selftest();
            sublift::print_selftest(std::cout, results);
            for (const auto& r : results) {
                if (!r.passed()) {
                    return kSelftest;
                }
            }
            return kOk;
        }
        CLI::App* active = convex->parsed() ? convex : denoise->parsed() ? denoise : ramp;
        sublift::Config cfg = config_path.empty() ? sublift::Config{} : sublift::Config::load(config_path);
        cfg.merge(overrides_from(active->remaining()));
        const int threads = cfg.get_int("threads", 0);
        if (threads > 0) {
            omp_set_num_threads(threads);
        }
        sublift::CommandResult result;
        if (active == convex) {
            result = sublift::cmd_convex_exact(cfg, std::cout);
        } else if (active == denoise) {
            result = sublift::cmd_denoise(cfg, std::cout);
        } else {
            result = sublift::cmd_ramp_bias(cfg, std::cout);
        }
        for (const auto& path : result.written) {
            std::cout << "wrote " << path << '\n';
        }
        if (result.exit_code == kNotConverged) {
            std::cerr << "warning: at least one solve stopped at max_iters\n";
        }
        return result.exit_code;
    } catch (const sublift::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const sublift::ImageError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid setting: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNotConverged;
    }
}
