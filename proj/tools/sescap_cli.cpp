// Command-line front end: run, figure, compare, spectrum, check.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sescap/sescap.hpp"

namespace fs = std::filesystem;
using namespace sescap;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
};

RunConfig resolve_config(const CommonArgs& a) {
  RunConfig c = a.config_path.empty() ? RunConfig{} : load_config(a.config_path);
  for (const auto& o : a.overrides) c = apply_override(c, o);
  if (!a.out_dir.empty()) c.output.directory = a.out_dir;
  validate_config(c);
  return c;
}

io::Header header_for(const RunConfig& c, const std::map<std::string, std::string>& hamiltonian = {}) {
  io::Header h;
  h.emplace_back("config", config_to_json(c));
  if (!hamiltonian.empty()) h.emplace_back("hamiltonian", io::to_json(hamiltonian));
  return h;
}

fs::path out_path(const RunConfig& c, const std::string& stem) {
  return fs::path(c.output.directory) / (c.output.prefix + "_" + stem + ".dat");
}

// Samples of `s` at the grid points of `g`; exact copy when the grids agree.
CVector on_grid(const WavepacketState& s, const GridSpec& g) {
  if (s.grid == g) return s.amplitudes;
  const RVector x = g.positions();
  return trig_interpolate(s, std::span<const double>(x.data(), x.size()));
}

// Rows x, then (Re, Im, |.|) for every state, on grid g.
void write_overlay(const fs::path& path, const io::Header& header, const GridSpec& g,
                   const std::vector<std::pair<std::string, const WavepacketState*>>& states) {
  std::vector<std::string> cols{"x"};
  std::vector<CVector> values;
  for (const auto& [name, s] : states) {
    cols.push_back("Re " + name);
    cols.push_back("Im " + name);
    cols.push_back("|" + name + "|");
    values.push_back(on_grid(*s, g));
  }
  std::vector<std::vector<double>> rows;
  for (int j = 0; j < g.n_points; ++j) {
    std::vector<double> row{g.x(j)};
    for (const auto& v : values) {
      row.push_back(v[j].real());
      row.push_back(v[j].imag());
      row.push_back(std::abs(v[j]));
    }
    rows.push_back(std::move(row));
  }
  io::write_table(path, header, cols, rows);
}

void print_run_summary(const RunArtifacts& r) {
  std::printf("snapshots: %zu (t = %g .. %g)\n", r.trajectory.snapshots.size(), r.trajectory.snapshots.front().time,
              r.trajectory.back().time);
  if (!r.errors.empty()) {
    std::printf("reference: N = %d, last doubling change %.3e\n", r.reference->n_points, r.reference->last_change);
    std::printf("inner-region max error at t = %g: %.6e\n", r.errors.back().t, r.errors.back().error);
  }
  std::printf("edge onset (threshold %.1e): %g\n", r.final_bound.onset_threshold, r.final_bound.onset);
  std::printf("final reflection bound: max %.3e at k = %.4f (epsilon %.1e, %zu violations)\n", r.final_bound.max_bound,
              r.final_bound.k_at_max, r.final_bound.epsilon, r.final_bound.violating.size());
}

int cmd_run(const CommonArgs& a) {
  const RunConfig c = resolve_config(a);
  const RunArtifacts r = run_config(c);
  const io::Header h = header_for(c, r.hamiltonian);
  io::write_snapshots(out_path(c, "snapshots"), r.trajectory, h);
  io::write_errors(out_path(c, "edge"), r.edge, h, "edge amplitude");
  io::write_bound(out_path(c, "bound"), r.final_bound, h);
  if (r.eigenvalues) io::write_spectrum(out_path(c, "spectrum"), *r.eigenvalues, h);
  if (r.reference) {
    io::Header hr = h;
    hr.emplace_back("reference", io::to_json(r.reference->trajectory.provenance));
    io::write_errors(out_path(c, "errors"), r.errors, hr);
    write_overlay(out_path(c, "final"), hr, r.trajectory.back().grid,
                  {{"run", &r.trajectory.back()}, {"exact", &r.reference->trajectory.back()}});
  }
  print_run_summary(r);
  return 0;
}

int cmd_spectrum(const CommonArgs& a) {
  const RunConfig c = resolve_config(a);
  const HamiltonianMatrix h = assemble(make_grid(c.grid), make_hamiltonian_spec(c));
  const EigenDecomposition d = eigendecompose(h);
  io::Header hd = header_for(c, h.metadata);
  hd.emplace_back("decomposition", nlohmann::json{{"max_residual", d.max_residual},
                                                  {"orthonormality_defect", d.max_orthonormality_defect},
                                                  {"self_orthogonal", d.self_orthogonal.size()}});
  io::write_spectrum(out_path(c, "spectrum"), d.eigenvalues, hd);
  std::printf("%d eigenvalues, max residual %.3e, orthonormality defect %.3e\n", d.size(), d.max_residual,
              d.max_orthonormality_defect);
  return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, double halfwidth, const std::string& norm,
                const std::string& out) {
  ErrorNorm n = ErrorNorm::max;
  if (norm == "l2") {
    n = ErrorNorm::l2;
  } else if (norm != "max") {
    throw ValidationError("compare: --norm must be max or l2");
  }
  const io::SnapshotFile a = io::read_snapshots(a_path);
  const io::SnapshotFile b = io::read_snapshots(b_path);
  const auto e = inner_region_error(a.trajectory, b.trajectory, halfwidth, n);
  if (!out.empty()) {
    io::Header h;
    h.emplace_back("compare", nlohmann::json{{"a", a_path}, {"b", b_path}, {"halfwidth", halfwidth}, {"norm", norm}});
    io::write_errors(out, e, h);
  }
  for (const auto& s : e) std::printf("%s, %s\n", io::fmt(s.t).c_str(), io::fmt(s.error).c_str());
  return 0;
}

int cmd_check(const CommonArgs& a, bool flip_v1) {
  const RunConfig c = resolve_config(a);
  CheckOptions opt;
  opt.flip_v1_sign = flip_v1;
  const auto results = run_checks(c, opt);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s  %-45s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    if (!r.passed) ++failed;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 2;
}

// --- figure presets --------------------------------------------------------

RunConfig nh_preset(RunConfig c, double p0, double t_final, bool dc) {
  c.contour.enabled = true;
  c.initial.p0 = p0;
  c.propagator.method = "eigen";
  c.propagator.t_final = t_final;
  c.dc.enabled = dc;
  c.tbc.enabled = false;
  c.monomial_cap.enabled = false;
  c.reference.enabled = false;
  return c;
}

int cmd_figure(const CommonArgs& a, int n) {
  if (n < 1 || n > 6) throw ValidationError("figure: number must be in 1..6");
  const RunConfig base = resolve_config(a);
  RunConfig named = base;
  named.output.prefix = "fig" + std::to_string(n);
  const GridSpec g = make_grid(base.grid);

  switch (n) {
    case 1:
    case 6: {
      RunConfig nh = nh_preset(base, 1.0, 60.0, false);
      const RunArtifacts r = run_config(nh);
      const ReferenceResult ref = reference_for(nh, 60.0);
      const double e_nh = inner_region_error(r.trajectory.back(), ref.trajectory.back(), base.diagnostics.region_halfwidth);
      std::vector<std::pair<std::string, const WavepacketState*>> cols{{"exact", &ref.trajectory.back()},
                                                                      {"NH-QM", &r.trajectory.back()}};
      std::optional<RunArtifacts> hqm;
      if (n == 6) {
        RunConfig hc = nh;
        hc.contour.enabled = false;
        hqm = run_config(hc);
        cols.push_back({"H-QM", &hqm->trajectory.back()});
      }
      io::Header h = header_for(named, r.hamiltonian);
      h.emplace_back("reference", io::to_json(ref.trajectory.provenance));
      write_overlay(out_path(named, "t60"), h, g, cols);
      std::printf("t=60 inner-region error NH-QM: %.6e\n", e_nh);
      if (hqm) {
        std::printf("t=60 inner-region error H-QM: %.6e\n",
                    inner_region_error(hqm->trajectory.back(), ref.trajectory.back(), base.diagnostics.region_halfwidth));
      }
      return 0;
    }
    case 2: {
      RunConfig nh = nh_preset(base, 0.0, 250.0, false);
      nh.propagator.dt = 0.5;
      nh.propagator.stride = 1;
      const RunArtifacts off = run_config(nh);
      nh.dc.enabled = true;
      const RunArtifacts on = run_config(nh);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < off.edge.size(); ++i) rows.push_back({off.edge[i].t, off.edge[i].error, on.edge[i].error});
      io::write_table(out_path(named, "edge"), header_for(named, on.hamiltonian), {"t", "|NH-QM(edge)|", "|NH-QM/dc(edge)|"},
                      rows);
      std::printf("edge onset (threshold %.1e): NH-QM %g, NH-QM/dc %g\n", base.diagnostics.onset_threshold,
                  edge_onset(off.trajectory, base.diagnostics.x_edge, base.diagnostics.onset_threshold),
                  edge_onset(on.trajectory, base.diagnostics.x_edge, base.diagnostics.onset_threshold));
      return 0;
    }
    case 3:
    case 4: {
      RunConfig nh = nh_preset(base, 0.0, 250.0, false);
      nh.propagator.dt = 0.5;
      nh.propagator.stride = 10;
      const RunArtifacts off = run_config(nh);
      nh.dc.enabled = true;
      const RunArtifacts on = run_config(nh);
      std::vector<std::pair<std::string, const WavepacketState*>> cols{{"NH-QM", &off.trajectory.back()},
                                                                      {"NH-QM/dc", &on.trajectory.back()}};
      io::Header h = header_for(named, on.hamiltonian);
      if (n == 3) {
        write_overlay(out_path(named, "t250"), h, g, cols);
        return 0;
      }
      const ReferenceResult ref = reference_for(nh, 250.0);
      cols.insert(cols.begin(), {"exact", &ref.trajectory.back()});
      h.emplace_back("reference", io::to_json(ref.trajectory.provenance));
      write_overlay(out_path(named, "t250"), h, g, cols);
      const auto e_off = inner_region_error(off.trajectory, ref.trajectory, base.diagnostics.region_halfwidth);
      const auto e_on = inner_region_error(on.trajectory, ref.trajectory, base.diagnostics.region_halfwidth);
      std::vector<std::vector<double>> rows;
      for (std::size_t i = 0; i < e_off.size(); ++i) rows.push_back({e_off[i].t, e_off[i].error, e_on[i].error});
      io::write_table(out_path(named, "errors"), h, {"t", "error NH-QM", "error NH-QM/dc"}, rows);
      std::printf("t=250 inner-region error: NH-QM %.6e, NH-QM/dc %.6e\n", e_off.back().error, e_on.back().error);
      return 0;
    }
    case 5: {
      RunConfig tc = base;
      tc.contour.enabled = false;
      tc.dc.enabled = false;
      tc.monomial_cap.enabled = false;
      tc.initial.p0 = 1.0;
      tc.propagator.method = "matrix_step";
      tc.propagator.t_final = 60.0;
      tc.tbc.enabled = true;
      tc.reference.enabled = true;
      const RunArtifacts r = run_config(tc);
      io::Header h = header_for(named, r.hamiltonian);
      h.emplace_back("reference", io::to_json(r.reference->trajectory.provenance));
      write_overlay(out_path(named, "t60"), h, g, {{"exact", &r.reference->trajectory.back()}, {"TBC", &r.trajectory.back()}});
      io::write_errors(out_path(named, "errors"), r.errors, h);
      std::printf("t=60 inner-region error with outgoing boundary rows: %.6e\n", r.errors.back().error);
      return 0;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smooth-exterior-scaling CAP wavepacket laboratory"};
  app.require_subcommand(1);
  CommonArgs common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config_path, "JSON configuration file");
    sub->add_option("-s,--set", common.overrides, "override a config key, e.g. --set contour.theta=0.3");
    sub->add_option("-o,--out", common.out_dir, "output directory (overrides output.directory)");
  };

  auto* run = app.add_subcommand("run", "propagate one configuration and write snapshots and reports");
  add_common(run);

  int figure_number = 0;
  auto* figure = app.add_subcommand("figure", "produce the data for one of the six figure presets");
  figure->add_option("n", figure_number, "figure number (1-6)")->required();
  add_common(figure);

  std::string cmp_a, cmp_b, cmp_norm = "max", cmp_out;
  double cmp_halfwidth = 85.0;
  auto* compare = app.add_subcommand("compare", "inner-region error between two snapshot files");
  compare->add_option("candidate", cmp_a, "snapshot file")->required();
  compare->add_option("reference", cmp_b, "snapshot file")->required();
  compare->add_option("--halfwidth", cmp_halfwidth, "region |x| <= halfwidth");
  compare->add_option("--norm", cmp_norm, "max or l2");
  compare->add_option("--write", cmp_out, "also write a t, error table here");

  auto* spectrum = app.add_subcommand("spectrum", "diagonalize the configured Hamiltonian and dump its spectrum");
  add_common(spectrum);

  bool flip_v1 = false;
  auto* check = app.add_subcommand("check", "run the invariant suite");
  add_common(check);
  check->add_flag("--flip-v1", flip_v1, "test hook: flip the sign of V1 during assembly");

  auto* dump = app.add_subcommand("config", "print the resolved configuration as JSON");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(common);
    if (*figure) return cmd_figure(common, figure_number);
    if (*compare) return cmd_compare(cmp_a, cmp_b, cmp_halfwidth, cmp_norm, cmp_out);
    if (*spectrum) return cmd_spectrum(common);
    if (*check) return cmd_check(common, flip_v1);
    if (*dump) {
      std::cout << config_to_json(resolve_config(common)).dump(2) << '\n';
      return 0;
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
