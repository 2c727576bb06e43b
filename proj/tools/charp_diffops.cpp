/*
   Copyright 2026 the charp-diffops authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "charp/cli.hpp"

namespace {

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw charp::cli_error("cannot open input file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generators and defining relations for rings of differential operators "
                 "on affine varieties over F_p"};

    bool do_analyze = false, do_ders = false, do_hs = false, do_dops = false;
    std::string weyl_expr;
    std::vector<std::string> base_flags;
    int nu_flag = -1;
    std::string json_out;
    std::string input_path = "-";

    app.add_flag("--analyze", do_analyze, "rank, tuple sets, critical set, regularity");
    app.add_flag("--ders", do_ders, "derivation-module generators and relations");
    app.add_flag("--hs", do_hs, "lift a truncated higher derivation and run its checks");
    app.add_flag("--dops", do_dops, "schedule, d^[k], coefficient tables, relation suites");
    app.add_option("--weyl", weyl_expr, "normal-form calculator in D(P_n)");
    app.add_option("--base", base_flags, "base tuples \"i;j\" (1-based, comma-separated)");
    app.add_option("--nu", nu_flag, "distinguished complement index (r+1..n)");
    app.add_option("--json-out", json_out, "also write the JSON report to this path");
    app.add_option("input", input_path, "input JSON document (default: stdin)");

    CLI11_PARSE(app, argc, argv);

    int selected = int(do_analyze) + int(do_ders) + int(do_hs) + int(do_dops) +
                   int(!weyl_expr.empty());
    if (selected != 1) {
        std::cerr << "error: choose exactly one of --analyze --ders --hs --dops --weyl\n";
        return charp::kExitUsage;
    }

    try {
        auto t0 = std::chrono::steady_clock::now();
        charp::Json doc = charp::Json::parse(read_input(input_path));
        charp::VarietySpec spec = charp::spec_from_json(doc);
        if (!base_flags.empty()) spec.bases = base_flags;
        if (nu_flag >= 0) spec.nu = static_cast<std::uint32_t>(nu_flag);

        charp::CmdResult res;
        if (do_analyze) res = charp::cmd_analyze(spec);
        else if (do_ders) res = charp::cmd_ders(spec);
        else if (do_hs) res = charp::cmd_hs(spec);
        else if (do_dops) res = charp::cmd_dops(spec);
        else res = charp::cmd_weyl(spec, weyl_expr);

        std::string text = res.report.dump(2);
        std::cout << text << "\n";
        if (!json_out.empty()) {
            std::ofstream out(json_out);
            if (!out) throw charp::cli_error("cannot write " + json_out);
            out << text << "\n";
        }

        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::cerr << res.report["command"].get<std::string>() << ": exit " << res.exit_code
                  << ", " << ms << " ms\n";
        if (res.report.contains("regular"))
            std::cerr << "regular: " << (res.report["regular"].get<bool>() ? "yes" : "no")
                      << "\n";
        return res.exit_code;
    } catch (const charp::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return charp::kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return charp::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return charp::kExitUsage;
    }
}
