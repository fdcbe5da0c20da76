#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hypid/errors.hpp"
#include "hypid/harness.hpp"
#include "hypid/hyp.hpp"
#include "json.hpp"

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        const size_t b = item.find_first_not_of(" \t");
        const size_t e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<double> split_doubles(const std::string& s, const char* what) {
    std::vector<double> out;
    for (const std::string& item : split_commas(s)) {
        try {
            size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw hypid::ConstraintViolation(std::string("invalid ") + what + " entry: " + item);
        }
    }
    return out;
}

std::vector<int> split_ints(const std::string& s, const char* what) {
    std::vector<int> out;
    for (const std::string& item : split_commas(s)) {
        try {
            size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw hypid::ConstraintViolation(std::string("invalid ") + what + " entry: " + item);
        }
    }
    return out;
}

int emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return 0;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file: " << out_path << "\n";
        return 2;
    }
    f << content;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical identities for hypergeometric series with integral parameter shifts"};
    app.require_subcommand(1);

    std::string eval_expr;
    double eval_tol = 1e-12;
    CLI::App* cmd_eval =
        app.add_subcommand("eval", "Evaluate a series given as 'top;bottom;x', e.g. '0.5;;0.25'");
    cmd_eval->add_option("expr", eval_expr, "semicolon-separated top list, bottom list, argument")
        ->required();
    cmd_eval->add_option("--tol", eval_tol, "relative stopping tolerance (default 1e-12)");

    std::string chk_config, chk_out, chk_format = "json", chk_identities;
    std::uint64_t chk_seed = 0;
    int chk_draws = 0;
    double chk_tol = 0.0;
    CLI::App* cmd_check =
        app.add_subcommand("check", "Sample every identity at random admissible points");
    cmd_check->add_option("--seed", chk_seed, "base RNG seed (default 1)");
    cmd_check->add_option("--draws", chk_draws, "cases per identity (default 50)");
    cmd_check->add_option("--tol", chk_tol, "pass/fail relative tolerance (default 1e-6)");
    cmd_check->add_option("--config", chk_config, "key = value config file");
    cmd_check->add_option("--identities", chk_identities, "comma-separated identity subset");
    cmd_check->add_option("--out", chk_out, "write the report here instead of stdout");
    cmd_check->add_option("--format", chk_format, "json or csv (default json)")
        ->check(CLI::IsMember({"json", "csv"}));

    int lim_lemma = 1, lim_q = 0;
    double lim_a = 0.4, lim_b = 0.7;
    std::string lim_f = "2.3", lim_m = "2", lim_eps, lim_out, lim_format = "csv";
    CLI::App* cmd_limits = app.add_subcommand(
        "limits", "Study the m -> characteristic-root limit of a contiguous bottom parameter");
    cmd_limits->add_option("--lemma", lim_lemma, "1 (first kind) or 2 (second kind)")
        ->check(CLI::IsMember({1, 2}));
    cmd_limits->add_option("--a", lim_a, "top parameter a (lemma 2 only, default 0.4)");
    cmd_limits->add_option("--b", lim_b, "top parameter b (default 0.7)");
    cmd_limits->add_option("--f", lim_f, "comma-separated shifted parameters (default 2.3)");
    cmd_limits->add_option("--m", lim_m, "comma-separated positive shifts (default 2)");
    cmd_limits->add_option("--q", lim_q, "degeneration order, 0 <= q <= m_total-1 (default 0)");
    cmd_limits->add_option("--eps", lim_eps, "comma-separated perturbations (default 1e-3,1e-4,1e-5)");
    cmd_limits->add_option("--out", lim_out, "write the study here instead of stdout");
    cmd_limits->add_option("--format", lim_format, "csv or json (default csv)")
        ->check(CLI::IsMember({"json", "csv"}));

    std::string gold_out, gold_format = "json";
    CLI::App* cmd_golden =
        app.add_subcommand("golden", "Re-derive the pinned worked-example corpus");
    cmd_golden->add_option("--out", gold_out, "write the report here instead of stdout");
    cmd_golden->add_option("--format", gold_format, "json or csv (default json)")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_eval->parsed()) {
            const hypid::EvalRequest req = hypid::parse_eval_expr(eval_expr);
            hypid::set_term_cap(hypid::effective_term_cap(hypid::term_cap()));
            std::cout << hypid::format_eval(req, eval_tol);
            return 0;
        }

        if (cmd_check->parsed()) {
            hypid::RunConfig cfg;
            if (!chk_config.empty()) cfg = hypid::parse_config_file(chk_config);
            if (cmd_check->count("--seed")) cfg.seed = chk_seed;
            if (cmd_check->count("--draws")) cfg.draws = chk_draws;
            if (cmd_check->count("--tol")) cfg.rel_tol = chk_tol;
            if (cmd_check->count("--identities")) cfg.identities = split_commas(chk_identities);
            const hypid::RunReport rep = hypid::run_check(cfg);
            std::string body;
            if (chk_format == "csv") {
                body = hypid::render_report_csv(rep);
            } else {
                nlohmann::json header;
                header["command"] = "check";
                header["schema"] = "hypid-report-v1";
                header["config"] =
                    hypid::config_json(cfg, hypid::effective_term_cap(cfg.term_cap));
                body = hypid::render_report_jsonl(rep, header);
            }
            const int io = emit(chk_out, body);
            return io != 0 ? io : hypid::report_exit_code(rep);
        }

        if (cmd_limits->parsed()) {
            hypid::LimitsRequest req;
            req.lemma = lim_lemma;
            req.a = hypid::Cx(lim_a, 0.0);
            req.b = hypid::Cx(lim_b, 0.0);
            const std::vector<double> fs = split_doubles(lim_f, "--f");
            const std::vector<int> ms = split_ints(lim_m, "--m");
            if (fs.empty() || fs.size() != ms.size())
                throw hypid::ConstraintViolation("--f and --m need the same non-zero length");
            hypid::ParamVec f;
            for (double v : fs) f.push_back(hypid::Cx(v, 0.0));
            req.spec = hypid::IpdSpec(std::move(f), ms);
            req.q = lim_q;
            if (!lim_eps.empty()) req.eps = split_doubles(lim_eps, "--eps");
            const hypid::LimitStudy st = hypid::run_limits(req);
            const std::string body = lim_format == "json" ? hypid::render_limits_json(req, st)
                                                          : hypid::render_limits_csv(req, st);
            return emit(lim_out, body);
        }

        if (cmd_golden->parsed()) {
            const hypid::RunReport rep = hypid::run_golden();
            std::string body;
            if (gold_format == "csv") {
                body = hypid::render_report_csv(rep);
            } else {
                nlohmann::json header;
                header["command"] = "golden";
                header["schema"] = "hypid-report-v1";
                body = hypid::render_report_jsonl(rep, header);
            }
            const int io = emit(gold_out, body);
            return io != 0 ? io : hypid::report_exit_code(rep);
        }
    } catch (const hypid::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hypid::ConstraintViolation& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const hypid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
