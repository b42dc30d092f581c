#include <catch2/catch_amalgamated.hpp>

#include "spinsync/config.hpp"

#include <string>
#include <vector>

#include "helpers.hpp"

using namespace spinsync;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("serialize/parse round trip reproduces every job mode") {
  std::vector<JobSpec> specs;

  {
    JobSpec s;
    s.mode = JobMode::steady;
    s.system.n_spins = 2;
    s.system.gamma_g = {1.0, 2.5};
    s.system.gamma_d = {2.5, 1.0};
    s.system.omega = {0.125, 0.0};
    s.system.g = {0.3};
    s.outputs = {"m1_A", "m1_AB", "p_max"};
    s.out_path = "steady.json";
    s.format = OutputFormat::json;
    s.workers = 3;
    specs.push_back(s);
  }
  {
    JobSpec s;
    s.mode = JobMode::dist;
    s.system.n_spins = 2;
    s.system.gamma_g = {1.0, 1.0};
    s.system.gamma_d = {1.0, 1.0};
    s.system.omega = {0.01, 0.0};
    s.system.g = {0.2};
    s.samples = 48;
    s.joint = JointKind::s2;
    specs.push_back(s);
  }
  {
    JobSpec s;
    s.mode = JobMode::dist;
    s.system.n_spins = 3;
    s.system.gamma_g = {1.0, 1.0, 1.0};
    s.system.gamma_d = {1.0, 1.0, 1.0};
    s.system.omega = {0.0, 0.0, 0.0};
    s.system.g = {0.12, 0.12};
    s.samples = 24;
    s.joint = JointKind::s3_ab_ca;
    specs.push_back(s);
  }
  {
    JobSpec s;
    s.mode = JobMode::sweep2d;
    s.system.n_spins = 2;
    s.system.gamma_g = {1.0, 1.0};
    s.system.gamma_d = {1.0, 1.0};
    s.system.omega = {0.0, 0.0};
    s.system.g = {0.0};
    s.x = AxisSpec{"omega_A", true, 1e-3, 1e-1, 7};
    specs.push_back(s);          // x only
    s.y = AxisSpec{"g_AB", false, 0.05, 0.5, 4};
    s.workers = 2;
    specs.push_back(s);          // x and y
  }
  {
    JobSpec s;
    s.mode = JobMode::perturb;
    s.system.n_spins = 2;
    s.system.gamma_g = {1.0, 1.0};
    s.system.gamma_d = {1.0, 1.0};
    s.system.omega = {2e-3, 0.0};
    s.system.g = {1e-3};
    s.max_order = 5;
    s.outputs = {"m1_B"};
    specs.push_back(s);
  }
  {
    JobSpec s;
    s.mode = JobMode::entangle;
    s.system.n_spins = 1;
    s.system.gamma_g = {2.0};
    s.system.gamma_d = {1.0};
    s.system.omega = {0.4};
    s.entropy_base_two = true;
    specs.push_back(s);
  }
  {
    JobSpec s;
    s.mode = JobMode::locus;
    s.locus = LocusSpec{LocusTarget::m1_ab, 0.05, true, 1.0, 2e-3, 1e-4, 0.9};
    specs.push_back(s);
    s.locus = LocusSpec{LocusTarget::m1_a, 0.1, false, 2.0, 1e-3, 1e-3, 0.5};
    specs.push_back(s);
  }

  for (size_t k = 0; k < specs.size(); ++k) {
    const JobSpec& s = specs[k];
    INFO("spec #" << k << " (mode " << to_string(s.mode) << ")");
    const std::string text = serialize_config(s);
    const JobSpec back = parse_config(text);
    REQUIRE(back == s);
    REQUIRE(serialize_config(back) == text);
  }
}

TEST_CASE("parser applies defaults and broadcasts single rate values") {
  const JobSpec spec = parse_config(
      "[system]\n"
      "n_spins = 3\n"
      "gamma_g = 2\n"
      "omega = 0.5, 0, 0\n"
      "g = 0.1\n");
  REQUIRE(spec.mode == JobMode::steady);
  REQUIRE(spec.system.gamma_g == std::vector<double>{2.0, 2.0, 2.0});
  REQUIRE(spec.system.gamma_d == std::vector<double>{1.0, 1.0, 1.0});  // untouched default
  REQUIRE(spec.system.omega == std::vector<double>{0.5, 0.0, 0.0});
  REQUIRE(spec.system.g == std::vector<double>{0.1, 0.1});  // one value per bond
  REQUIRE(spec.outputs.empty());
  REQUIRE(spec.out_path.empty());
  REQUIRE(spec.format == OutputFormat::csv);
  REQUIRE(spec.workers == 0);
  REQUIRE(spec.samples == 360);
  REQUIRE(spec.max_order == 4);
  REQUIRE_FALSE(spec.entropy_base_two);
  REQUIRE(spec.joint == JointKind::none);
}

TEST_CASE("parser strips comments and tolerates loose spacing") {
  const JobSpec spec = parse_config(
      "# leading comment\n"
      "\n"
      "  [system]  \n"
      "n_spins = 2   # two coupled spins\n"
      "\tgamma_g=  4 ,1\n"
      "g = 0.7\n"
      "\n"
      "[job]\n"
      "outputs = m1_A , m2_AB\n"
      "format = json # machine readable\n");
  REQUIRE(spec.system.gamma_g == std::vector<double>{4.0, 1.0});
  REQUIRE(spec.system.g == std::vector<double>{0.7});
  REQUIRE(spec.outputs == std::vector<std::string>{"m1_A", "m2_AB"});
  REQUIRE(spec.format == OutputFormat::json);
}

TEST_CASE("parse failures name the offending line") {
  struct Case {
    const char* text;
    const char* needle;
  };
  const Case cases[] = {
      {"[system]\nn_spins = 2\nbogus = 1\n", "line 3: unknown key 'bogus'"},
      {"[system]\nn_spins = 2\nomega = fast\n", "line 3: not a number"},
      {"[system]\nn_spins = 2\nomega = 1.5x\n", "line 3: trailing junk"},
      {"[system]\nn_spins = 2.5\n", "line 2: expected an integer"},
      {"[system]\nn_spins = 4\n", "line 2: n_spins must be 1, 2, or 3"},
      {"[systems]\n", "line 1: unknown section [systems]"},
      {"[system\nn_spins = 1\n", "line 1: unterminated section header"},
      {"[system]\nn_spins 2\n", "line 2: expected key = value"},
      {"n_spins = 1\n", "line 1: key outside any section"},
      {"[system]\nn_spins = 1\n[job]\nmode = orbit\n", "unknown mode: orbit"},
      {"[system]\nn_spins = 1\n[job]\nformat = xml\n", "format must be csv or json"},
      {"[system]\nn_spins = 1\n[job]\nentropy_base = 10\n", "entropy_base must be e or 2"},
      {"[system]\nn_spins = 1\n[job]\njoint = s4\n", "unknown joint kind"},
      {"[system]\nn_spins = 1\n[job]\nworkers = -1\n", "workers must be >= 0"},
      {"[system]\nn_spins = 2\n[job]\nmode = sweep2d\n[grid]\nx = omega_A\nx_count = 3\n"
       "x_min = 1\nx_max = 2\nx_scale = cubic\n",
       "scale must be linear or log"},
      {"[system]\nn_spins = 2\n[job]\nmode = sweep2d\n[grid]\nx = omega_A\nx_count = 3\n"
       "x_min = 1\nx_max = 2\nz_min = 1\n",
       "line 10: unknown key 'z_min'"},
      {"[job]\nmode = locus\n[locus]\ntarget = m2_AB\n", "target must be m1_A or m1_AB"},
      {"[job]\nmode = locus\n[locus]\ng_mode = scaled\n", "g_mode must be"},
  };
  for (const Case& c : cases) {
    INFO("config text:\n" << c.text);
    REQUIRE_THROWS_AS(parse_config(c.text), ConfigError);
    REQUIRE_THROWS_WITH(parse_config(c.text), ContainsSubstring(c.needle));
  }
}

TEST_CASE("rate lists must match the system size") {
  REQUIRE_THROWS_WITH(parse_config("[system]\nn_spins = 2\ngamma_d = 1, 2, 3\n"),
                      ContainsSubstring("gamma_d needs 1 or 2 values"));
  REQUIRE_THROWS_WITH(parse_config("[system]\nn_spins = 2\ng = 0.1, 0.2\n"),
                      ContainsSubstring("g needs"));
  REQUIRE_THROWS_WITH(parse_config("[job]\nformat = csv\n"),
                      ContainsSubstring("n_spins is required"));
  // physical validation still runs on the assembled system
  REQUIRE_THROWS_AS(parse_config("[system]\nn_spins = 1\ngamma_g = -1\n"), ConfigError);
  REQUIRE_THROWS_AS(parse_config("[system]\nn_spins = 1\ngamma_g = 0\ngamma_d = 0\n"),
                    ConfigError);
}

TEST_CASE("mode-specific constraints are enforced at parse time") {
  const std::string two_spin = "[system]\nn_spins = 2\n[job]\n";

  SECTION("dist sample range and joint arity") {
    REQUIRE_THROWS_WITH(parse_config(two_spin + "mode = dist\nsamples = 4\n"),
                        ContainsSubstring("8 <= samples <= 100000"));
    REQUIRE_THROWS_AS(parse_config(two_spin + "mode = dist\nsamples = 100001\n"), ConfigError);
    REQUIRE(parse_config(two_spin + "mode = dist\nsamples = 8\n").samples == 8);
    REQUIRE_THROWS_WITH(parse_config("[system]\nn_spins = 1\n[job]\nmode = dist\njoint = s2\n"),
                        ContainsSubstring("joint = s2 needs a two-spin system"));
    REQUIRE_THROWS_WITH(parse_config(two_spin + "mode = dist\njoint = s3_ab_bc\n"),
                        ContainsSubstring("three-spin joint kinds need a three-spin system"));
  }

  SECTION("perturb order range") {
    REQUIRE_THROWS_WITH(parse_config(two_spin + "mode = perturb\nmax_order = 9\n"),
                        ContainsSubstring("0 <= max_order <= 8"));
    REQUIRE_THROWS_AS(parse_config(two_spin + "mode = perturb\nmax_order = -1\n"), ConfigError);
    REQUIRE(parse_config(two_spin + "mode = perturb\nmax_order = 0\n").max_order == 0);
  }

  SECTION("locus owns its system description") {
    REQUIRE_THROWS_WITH(parse_config("[system]\nn_spins = 2\n[job]\nmode = locus\n"),
                        ContainsSubstring("drop the [system] section"));
    REQUIRE_THROWS_AS(parse_config("[job]\nmode = locus\n[locus]\nratio_min = 0\n"), ConfigError);
    REQUIRE_THROWS_AS(
        parse_config("[job]\nmode = locus\n[locus]\nratio_min = 0.5\nratio_max = 0.1\n"),
        ConfigError);
    REQUIRE_THROWS_AS(parse_config("[job]\nmode = locus\n[locus]\ng = 0\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("[job]\nmode = locus\n[locus]\ngamma_d = 0\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("[job]\nmode = locus\n[locus]\nprobe_omega = 0\n"),
                      ConfigError);
    const JobSpec ok = parse_config("[job]\nmode = locus\n");
    REQUIRE(ok.system == SystemConfig{});  // placeholder only
  }

  SECTION("sweep grids are validated and probed") {
    const std::string head = two_spin + "mode = sweep2d\n[grid]\n";
    REQUIRE_THROWS_WITH(parse_config(head + "x_min = 1\nx_max = 2\nx_count = 3\n"),
                        ContainsSubstring("grid axis needs a field name"));
    REQUIRE_THROWS_WITH(
        parse_config(head + "x = omega_A\nx_min = 1\nx_max = 2\nx_count = 0\n"),
        ContainsSubstring("count must be >= 1"));
    REQUIRE_THROWS_WITH(parse_config(head + "x = omega_A\nx_scale = log\nx_min = 0\n"
                                            "x_max = 1\nx_count = 3\n"),
                        ContainsSubstring("log axis needs min > 0"));
    REQUIRE_THROWS_WITH(
        parse_config(head + "x = omega_A\nx_min = 2\nx_max = 2\nx_count = 3\n"),
        ContainsSubstring("max > min"));
    REQUIRE_THROWS_WITH(
        parse_config(head + "x = alpha\nx_min = 1\nx_max = 2\nx_count = 3\n"),
        ContainsSubstring("unknown sweep field: alpha"));
    REQUIRE_THROWS_WITH(
        parse_config(head + "x = omega_Q\nx_min = 1\nx_max = 2\nx_count = 3\n"),
        ContainsSubstring("field site out of range"));
    REQUIRE_THROWS_WITH(parse_config(head + "x = omega_A\nx_min = 1\nx_max = 2\nx_count = 3\n"
                                            "y = g_BC\ny_min = 0.1\ny_max = 1\ny_count = 2\n"),
                        ContainsSubstring("g_BC needs three spins"));
  }
}

TEST_CASE("a mode override replaces the file mode before validation") {
  const std::string text =
      "[system]\n"
      "n_spins = 2\n"
      "[job]\n"
      "mode = steady\n"
      "samples = 4\n";
  REQUIRE(parse_config(text).mode == JobMode::steady);  // samples unchecked here

  const JobMode as_dist = JobMode::dist;
  REQUIRE_THROWS_WITH(parse_config(text, &as_dist),
                      ContainsSubstring("8 <= samples <= 100000"));

  const std::string grid_text =
      "[system]\n"
      "n_spins = 2\n"
      "[grid]\n"
      "x = g_AB\n"
      "x_min = 0.1\n"
      "x_max = 1\n"
      "x_count = 5\n";
  const JobMode as_sweep = JobMode::sweep2d;
  const JobSpec swept = parse_config(grid_text, &as_sweep);
  REQUIRE(swept.mode == JobMode::sweep2d);
  REQUIRE(swept.x.field == "g_AB");
  REQUIRE(swept.y == AxisSpec{});  // no y keys -> single row

  const JobMode as_locus = JobMode::locus;
  REQUIRE_THROWS_WITH(parse_config(text, &as_locus),
                      ContainsSubstring("drop the [system] section"));
}

TEST_CASE("sweep fields address sites, bonds, and the inverted-rate pair") {
  SystemConfig c = SystemConfig::equal_rates(3, 1.0, {0.0, 0.0, 0.0}, {0.0, 0.0});
  apply_field(c, "omega_B", 0.25);
  apply_field(c, "gamma_g_C", 3.0);
  apply_field(c, "gamma_d_A", 0.5);
  apply_field(c, "g_AB", 0.1);
  apply_field(c, "g_BC", 0.2);
  REQUIRE(c.omega == std::vector<double>{0.0, 0.25, 0.0});
  REQUIRE(c.gamma_g == std::vector<double>{1.0, 1.0, 3.0});
  REQUIRE(c.gamma_d == std::vector<double>{0.5, 1.0, 1.0});
  REQUIRE(c.g == std::vector<double>{0.1, 0.2});

  SystemConfig pair = SystemConfig::equal_rates(2, 1.0, {0.0, 0.0}, {0.0});
  apply_field(pair, "gamma_inverted", 7.0);
  REQUIRE(pair.gamma_g == std::vector<double>{7.0, 1.0});
  REQUIRE(pair.gamma_d == std::vector<double>{1.0, 7.0});

  REQUIRE_THROWS_AS(apply_field(pair, "g_BC", 0.1), ConfigError);
  REQUIRE_THROWS_AS(apply_field(c, "gamma_inverted", 1.0), ConfigError);
  REQUIRE_THROWS_AS(apply_field(c, "omega_D", 1.0), ConfigError);
  REQUIRE_THROWS_AS(apply_field(c, "coupling", 1.0), ConfigError);
}

TEST_CASE("grid axes interpolate linearly or geometrically") {
  const AxisSpec lin{"omega_A", false, 0.0, 10.0, 5};
  REQUIRE(lin.value_at(0) == 0.0);
  REQUIRE(lin.value_at(2) == Catch::Approx(5.0));
  REQUIRE(lin.value_at(4) == 10.0);

  const AxisSpec log{"g_AB", true, 1e-2, 1.0, 3};
  REQUIRE(log.value_at(0) == Catch::Approx(1e-2));
  REQUIRE(log.value_at(1) == Catch::Approx(1e-1));
  REQUIRE(log.value_at(2) == Catch::Approx(1.0));

  const AxisSpec single{"omega_A", false, 0.7, 0.0, 1};
  REQUIRE(single.value_at(0) == 0.7);
  REQUIRE_THROWS_AS(single.value_at(1), ConfigError);
  REQUIRE_THROWS_AS(lin.value_at(-1), ConfigError);
}

TEST_CASE("mode names round trip") {
  for (JobMode m : {JobMode::steady, JobMode::dist, JobMode::sweep2d, JobMode::locus,
                    JobMode::perturb, JobMode::entangle})
    REQUIRE(mode_from_string(to_string(m)) == m);
  REQUIRE_THROWS_AS(mode_from_string("spectral"), ConfigError);
}
