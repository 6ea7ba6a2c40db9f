#pragma once

// Command-line front end. `run_cli` takes the argument vector and output
// streams so the commands can be driven in-process by tests.
//
// Exit codes: 0 success (whatever the statistical outcome), 1 internal error,
// 2 bad input or usage.
//
//   describe  <input> --column C
//   outliers  <input> --response R --factor F
//   boxplot   <input> --response R --factor F          (JSON by default)
//   analyze   <input> --response R --factor F [--alpha ...]
//   validate  [--test T] [--group dist:params:n ...] [--replications R] [--seed S]
//
// <input> is a CSV path or builtin:table2. Output is text unless --format
// json (or STATTREE_FORMAT=json) is given.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stattree/dataset.hpp"
#include "stattree/decision_engine.hpp"
#include "stattree/descriptive.hpp"
#include "stattree/errors.hpp"
#include "stattree/json_io.hpp"
#include "stattree/montecarlo.hpp"

namespace stattree::cli {

enum class OutputFormat { text, json };

inline constexpr std::string_view kBuiltinTable2 = "builtin:table2";

inline Dataset load_input(const std::string& input) {
  if (input == kBuiltinTable2) return builtin_table2();
  std::ifstream in(input, std::ios::binary);
  if (!in) throw DataError("cannot open input file '" + input + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

// ---- text rendering ------------------------------------------------------

inline std::string fmt3(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

inline std::string fmt_p(double p) { return detail::format_p(p); }

inline std::string fmt_list(const std::vector<double>& v) {
  if (v.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt3(v[i]);
  return s;
}

inline void render_summary(std::ostream& out, const DescriptiveSummary& d,
                           const std::string& indent) {
  auto row = [&](const char* name, const std::string& value) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s%-20s %s\n", indent.c_str(), name, value.c_str());
    out << buf;
  };
  row("n", std::to_string(d.n));
  row("mean", fmt3(d.mean));
  row("median", fmt3(d.median));
  row("modes", d.modes.empty() ? "* (number of modes 0)"
                               : fmt_list(d.modes) + " (number of modes " +
                                     std::to_string(d.modes.size()) + ")");
  row("range", fmt3(d.range));
  row("min", fmt3(d.min));
  row("max", fmt3(d.max));
  row("q1", fmt3(d.q1));
  row("q3", fmt3(d.q3));
  row("variance", fmt3(d.variance));
  row("stddev", fmt3(d.stddev));
}

inline void render_outliers(std::ostream& out, const OutlierReport& o, const std::string& indent) {
  out << indent << "L (Q3 - Q1)          " << fmt3(o.l) << "\n";
  out << indent << "inner fences         [" << fmt3(o.inner_fences.low) << ", "
      << fmt3(o.inner_fences.high) << "]\n";
  out << indent << "outer fences         [" << fmt3(o.outer_fences.low) << ", "
      << fmt3(o.outer_fences.high) << "]\n";
  out << indent << "mild                 " << fmt_list(o.mild) << "\n";
  out << indent << "extreme              " << fmt_list(o.extreme) << "\n";
}

inline std::string render_test(const TestResult& r) {
  std::string s = std::string(to_string(r.method)) + ": " + r.statistic_name + " = " +
                  fmt3(r.statistic);
  if (r.df.size() == 1) s += ", df = " + fmt3(r.df[0]);
  if (r.df.size() == 2) s += ", df = (" + fmt3(r.df[0]) + ", " + fmt3(r.df[1]) + ")";
  s += ", p = " + fmt_p(r.p_value);
  return s;
}

inline void render_report(std::ostream& out, const AnalysisReport& r) {
  out << "Analysis of " << r.response << " by " << r.factor << " (alpha = "
      << detail::format_alpha(r.config.alpha) << ")\n";
  out << "H0: " << r.hypotheses.h0 << "\n";
  out << "H1: " << r.hypotheses.h1 << "\n\n";
  for (const auto& g : r.groups) {
    out << "Group " << g.label << "\n";
    render_summary(out, g.summary, "  ");
    if (g.outliers) {
      render_outliers(out, *g.outliers, "  ");
    } else {
      out << "  outliers             not assessed (n < 4)\n";
    }
  }
  out << "\nDecision trace\n";
  std::size_t i = 1;
  for (const auto& s : r.trace.steps) {
    out << "  " << i++ << ". " << to_string(s.node);
    if (!s.group.empty()) out << " [" << s.group << "]";
    if (s.informational) out << " (informational)";
    out << "\n";
    if (s.evidence) out << "     " << render_test(*s.evidence) << "\n";
    out << "     -> " << s.outcome << "\n";
  }
  if (r.anova) {
    const auto& a = *r.anova;
    out << "\nANOVA table\n";
    out << "  between  SS = " << fmt3(a.ss_between) << "  df = " << fmt3(a.df_between)
        << "  MS = " << fmt3(a.ms_between) << "\n";
    out << "  within   SS = " << fmt3(a.ss_within) << "  df = " << fmt3(a.df_within)
        << "  MS = " << fmt3(a.ms_within) << "\n";
    out << "  F = " << fmt3(a.f) << "  p = " << fmt_p(a.p_value) << "\n";
  }
  if (r.posthoc) {
    out << "\nPost-hoc: " << to_string(r.posthoc->family_method)
        << " (correction: " << to_string(r.posthoc->correction) << ")\n";
    for (const auto& c : r.posthoc->comparisons) {
      out << "  " << c.label_a << " - " << c.label_b << ": estimate = " << fmt3(c.estimate)
          << ", statistic = " << fmt3(c.statistic) << ", p = " << fmt_p(c.p_value)
          << (c.significant_at_alpha ? "  significant" : "") << "\n";
    }
  }
  out << "\nConclusion: " << to_string(r.conclusion) << " (" << to_string(r.primary.method)
      << " p = " << fmt_p(r.primary.p_value) << ", alpha = "
      << detail::format_alpha(r.config.alpha) << ")\n";
}

// ---- validate scenario parsing -------------------------------------------

// "normal:mu:sigma:n", "uniform:a:b:n" or "exponential:lambda:n".
inline GroupSpec parse_group_spec(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto num = [&](const std::string& s) {
    auto v = detail::parse_number(s);
    if (!v) throw DataError("bad number '" + s + "' in group spec '" + spec + "'");
    return *v;
  };
  auto count = [&](const std::string& s) {
    const double v = num(s);
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw DataError("bad group size '" + s + "' in group spec '" + spec + "'");
    }
    return static_cast<std::size_t>(v);
  };
  if (!parts.empty() && parts[0] == "normal" && parts.size() == 4) {
    return {NormalDist{num(parts[1]), num(parts[2])}, count(parts[3])};
  }
  if (!parts.empty() && parts[0] == "uniform" && parts.size() == 4) {
    return {UniformDist{num(parts[1]), num(parts[2])}, count(parts[3])};
  }
  if (!parts.empty() && parts[0] == "exponential" && parts.size() == 3) {
    return {ExponentialDist{num(parts[1])}, count(parts[2])};
  }
  throw DataError("bad group spec '" + spec +
                  "' (expected normal:mu:sigma:n, uniform:a:b:n or exponential:lambda:n)");
}

// ---- entry point ---------------------------------------------------------

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hypothesis-test selection and execution over grouped data", "stattree"};
  app.require_subcommand(1);

  OutputFormat format = OutputFormat::text;
  if (const char* env = std::getenv("STATTREE_FORMAT")) {
    const std::string e = env;
    if (e == "json") format = OutputFormat::json;
    else if (e != "text" && !e.empty()) {
      err << "error: STATTREE_FORMAT must be 'text' or 'json'\n";
      return 2;
    }
  }
  const std::map<std::string, OutputFormat> formats{{"text", OutputFormat::text},
                                                    {"json", OutputFormat::json}};
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format (text|json)")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  };

  std::string input, column, response, factor;
  EngineConfig cfg;
  bool lilliefors = false;

  auto* describe_cmd = app.add_subcommand("describe", "Descriptive statistics of one column");
  describe_cmd->add_option("input", input, "CSV path or builtin:table2")->required();
  describe_cmd->add_option("--column", column, "Numeric column")->required();
  add_format(describe_cmd);

  auto add_split = [&](CLI::App* sub) {
    sub->add_option("input", input, "CSV path or builtin:table2")->required();
    sub->add_option("--response", response, "Numeric response column")->required();
    sub->add_option("--factor", factor, "Categorical factor column")->required();
  };

  auto* outliers_cmd = app.add_subcommand("outliers", "Quartile-fence outliers per group");
  add_split(outliers_cmd);
  add_format(outliers_cmd);

  auto* boxplot_cmd = app.add_subcommand("boxplot", "Boxplot statistics per group");
  add_split(boxplot_cmd);
  std::optional<OutputFormat> boxplot_format;
  boxplot_cmd->add_option("--format", boxplot_format, "Output format (json|text)")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

  std::string center_name = "median", t_name = "pooled", correction_name = "none";
  auto* analyze_cmd = app.add_subcommand("analyze", "Run the full test-selection tree");
  add_split(analyze_cmd);
  analyze_cmd->add_option("--alpha", cfg.alpha, "Significance level")->default_val(0.05);
  analyze_cmd->add_option("--size-threshold", cfg.size_threshold,
                          "Groups below this size use Shapiro-Wilk, others KS")
      ->default_val(30);
  analyze_cmd->add_option("--levene-center", center_name, "median|mean")
      ->check(CLI::IsMember({"median", "mean"}));
  analyze_cmd->add_option("--t-variant", t_name, "pooled|welch")
      ->check(CLI::IsMember({"pooled", "welch"}));
  analyze_cmd->add_option("--posthoc-correction", correction_name, "none|bonferroni")
      ->check(CLI::IsMember({"none", "bonferroni"}));
  analyze_cmd->add_flag("--ks-lilliefors", lilliefors,
                        "Lilliefors p-values for the KS normality test");
  add_format(analyze_cmd);

  std::string test_name = "t_test";
  std::vector<std::string> group_specs;
  std::string truth_name = "null";
  long long replications = 10000;
  std::uint64_t seed = 1;
  double mc_alpha = 0.05;
  unsigned threads = 0;
  auto* validate_cmd = app.add_subcommand("validate", "Monte Carlo rejection-rate calibration");
  validate_cmd->add_option("--test", test_name,
                           "t_test|welch_t|anova|mann_whitney|kruskal_wallis|levene|"
                           "shapiro_wilk|pipeline");
  validate_cmd->add_option("--group", group_specs,
                           "Group spec, repeatable (default two normal:0:1:20)");
  validate_cmd->add_option("--truth", truth_name, "null|alternative");
  validate_cmd->add_option("--replications", replications, "Number of simulated data sets");
  validate_cmd->add_option("--seed", seed, "Master seed");
  validate_cmd->add_option("--alpha", mc_alpha, "Significance level");
  validate_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  add_format(validate_cmd);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << "\n";
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*describe_cmd) {
      const Dataset d = load_input(input);
      const Column& c = d.column(column);
      if (!c.is_numeric()) throw DataError("column '" + column + "' is not numeric");
      const DescriptiveSummary s = describe(c.numbers());
      if (format == OutputFormat::json) {
        out << json{{"column", column}, {"summary", s}}.dump(2) << "\n";
      } else {
        out << "Descriptive statistics: " << column << "\n";
        render_summary(out, s, "  ");
      }
    } else if (*outliers_cmd) {
      const GroupedSample g = select_response_factor(load_input(input), response, factor);
      json groups = json::array();
      for (const auto& grp : g.groups()) {
        groups.push_back({{"label", grp.label}, {"report", classify_outliers(grp.values)}});
      }
      if (format == OutputFormat::json) {
        out << json{{"response", response}, {"factor", factor}, {"groups", groups}}.dump(2)
            << "\n";
      } else {
        out << "Outliers of " << response << " by " << factor << "\n";
        for (const auto& grp : g.groups()) {
          out << "Group " << grp.label << "\n";
          render_outliers(out, classify_outliers(grp.values), "  ");
        }
      }
    } else if (*boxplot_cmd) {
      const GroupedSample g = select_response_factor(load_input(input), response, factor);
      json groups = json::array();
      for (const auto& grp : g.groups()) {
        json rec = boxplot_stats(grp.values);
        rec["label"] = grp.label;
        rec["n"] = grp.size();
        groups.push_back(std::move(rec));
      }
      if (boxplot_format.value_or(OutputFormat::json) == OutputFormat::json) {
        out << groups.dump(2) << "\n";
      } else {
        for (const auto& grp : g.groups()) {
          const BoxplotStats b = boxplot_stats(grp.values);
          out << grp.label << ": whiskers [" << fmt3(b.whisker_low) << ", "
              << fmt3(b.whisker_high) << "], box [" << fmt3(b.q1) << ", " << fmt3(b.median)
              << ", " << fmt3(b.q3) << "], flagged " << fmt_list(b.flagged_points) << "\n";
        }
      }
    } else if (*analyze_cmd) {
      cfg.levene_center = center_name == "mean" ? LeveneCenter::mean : LeveneCenter::median;
      cfg.t_variant = t_name == "welch" ? TVariant::welch : TVariant::pooled;
      cfg.posthoc_correction =
          correction_name == "bonferroni" ? PosthocCorrection::bonferroni : PosthocCorrection::none;
      cfg.ks_p_value = lilliefors ? KsPValue::lilliefors : KsPValue::asymptotic;
      cfg.validate();
      const GroupedSample g = select_response_factor(load_input(input), response, factor);
      const AnalysisReport rep = analyze(g, cfg);
      if (format == OutputFormat::json) {
        out << json(rep).dump(2) << "\n";
      } else {
        render_report(out, rep);
      }
    } else if (*validate_cmd) {
      if (replications < 1) throw DataError("replications must be >= 1");
      Scenario sc;
      sc.seed = seed;
      if (truth_name == "null") sc.truth = Truth::null_hypothesis;
      else if (truth_name == "alternative") sc.truth = Truth::alternative;
      else throw DataError("truth must be 'null' or 'alternative'");
      if (group_specs.empty()) group_specs = {"normal:0:1:20", "normal:0:1:20"};
      for (const auto& s : group_specs) sc.group_specs.push_back(parse_group_spec(s));
      const ErrorRateReport rep =
          simulate_error_rates(sc, parse_simulated_test(test_name),
                               static_cast<std::size_t>(replications), mc_alpha, threads);
      if (format == OutputFormat::json) {
        out << json(rep).dump(2) << "\n";
      } else {
        out << "test " << to_string(rep.test) << ", " << to_string(rep.truth)
            << " scenario, seed " << rep.seed << "\n";
        out << "rejections " << rep.rejections << " / " << rep.replications << "\n";
        out << "rate " << fmt3(rep.rate) << " (target " << fmt3(rep.target_alpha) << " +/- "
            << fmt3(rep.ci_halfwidth) << ")\n";
      }
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace stattree::cli
