#include "ppnn/datagen.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ppnn/io_util.hpp"
#include "ppnn/parallel.hpp"
#include "ppnn/rng.hpp"

namespace ppnn {

Grid2D Dataset::grid() const {
  if (trajectories.empty()) throw ConfigError("empty dataset has no grid");
  return trajectories.front().snapshots.front().grid;
}

int Dataset::channels() const {
  if (trajectories.empty()) throw ConfigError("empty dataset has no channels");
  return trajectories.front().snapshots.front().channels;
}

double Dataset::dt_learn() const {
  if (trajectories.empty()) throw ConfigError("empty dataset has no dt");
  return trajectories.front().dt_learn;
}

int Dataset::n_snapshots() const {
  if (trajectories.empty()) return 0;
  return static_cast<int>(trajectories.front().snapshots.size());
}

Field rd_random_ic(const Grid2D& grid, std::uint64_t seed) {
  GaussianGen gen(seed);
  Field f(grid, 2);
  for (double& v : f.data) v = gen.next();
  return linear_rescale(f, 0.1, 1.1);
}

Field burgers_fourier_ic(const Grid2D& grid, std::uint64_t seed, int max_mode) {
  GaussianGen gen(seed);
  const int nm = max_mode;
  const int nx = grid.nx, ny = grid.ny;

  // per-axis tables of sin/cos(2 pi m x / L) for m in [-nm, nm]
  const int nmodes = 2 * nm + 1;
  std::vector<double> sx(nmodes * nx), cx(nmodes * nx), sy(nmodes * ny), cy(nmodes * ny);
  for (int m = -nm; m <= nm; ++m) {
    const double kx = 2.0 * M_PI * m / grid.lx;
    const double ky = 2.0 * M_PI * m / grid.ly;
    for (int i = 0; i < nx; ++i) {
      sx[(m + nm) * nx + i] = std::sin(kx * i * grid.dx());
      cx[(m + nm) * nx + i] = std::cos(kx * i * grid.dx());
    }
    for (int j = 0; j < ny; ++j) {
      sy[(m + nm) * ny + j] = std::sin(ky * j * grid.dy());
      cy[(m + nm) * ny + j] = std::cos(ky * j * grid.dy());
    }
  }

  Field f(grid, 2);
  for (int i = -nm; i <= nm; ++i) {
    for (int j = -nm; j <= nm; ++j) {
      const double r1 = gen.next(), r2 = gen.next();
      const double r3 = gen.next(), r4 = gen.next();
      const double* sxi = &sx[(i + nm) * nx];
      const double* cxi = &cx[(i + nm) * nx];
      const double* syj = &sy[(j + nm) * ny];
      const double* cyj = &cy[(j + nm) * ny];
      for (int y = 0; y < ny; ++y) {
        // sin(a+b), cos(a+b) expanded so the axis tables can be reused
        const double syv = syj[y], cyv = cyj[y];
        double* u_row = &f.data[static_cast<std::size_t>(y) * nx];
        double* v_row = &f.data[static_cast<std::size_t>(ny + y) * nx];
        for (int x = 0; x < nx; ++x) {
          const double sv = sxi[x] * cyv + cxi[x] * syv;
          const double cv = cxi[x] * cyv - sxi[x] * syv;
          u_row[x] += r1 * sv + r2 * cv;
          v_row[x] += r3 * sv + r4 * cv;
        }
      }
    }
  }
  return linear_rescale(f, 0.1, 1.1);
}

Trajectory generate_trajectory(const PdeSpec& spec, const Field& ic, double dt_num,
                               int steps_per_snapshot, int n_snapshots, int burn_in) {
  if (!(dt_num > 0.0)) throw ConfigError("generate_trajectory: dt_num must be positive");
  if (steps_per_snapshot < 1) throw ConfigError("steps_per_snapshot must be >= 1");
  if (n_snapshots < 2) throw ConfigError("a trajectory needs at least 2 snapshots");
  if (burn_in < 0) throw ConfigError("burn_in must be >= 0");

  Trajectory traj;
  traj.dt_learn = steps_per_snapshot * dt_num;
  traj.params.names = {spec.parameter_name()};
  traj.params.values = {spec.parameter()};

  Field state = ic;
  long long step = 0;
  auto advance = [&](int n) {
    for (int k = 0; k < n; ++k) {
      state = euler_step(spec, state, dt_num);
      ++step;
      if (state.diverged) {
        throw DivergedError("solver diverged at numerical step " + std::to_string(step));
      }
    }
  };

  advance(burn_in);
  traj.snapshots.push_back(state);
  for (int s = 1; s < n_snapshots; ++s) {
    advance(steps_per_snapshot);
    traj.snapshots.push_back(state);
  }
  return traj;
}

Dataset generate_dataset(const DatasetRecipe& recipe) {
  if (recipe.param_values.empty()) {
    throw ConfigError("dataset recipe needs at least one parameter value");
  }
  if (recipe.ics_per_param < 1) throw ConfigError("ics_per_param must be >= 1");

  Dataset ds;
  ds.system = recipe.spec.system_name();
  ds.seed = recipe.seed;
  ds.kind = recipe.kind;
  {
    std::ostringstream sch;
    sch << "laplacian_order=" << recipe.spec.laplacian_order << ";time=euler";
    if (ds.system == "burgers") sch << ";convection=upwind3";
    sch << ";dt_num=" << recipe.dt_num << ";steps_per_snapshot=" << recipe.steps_per_snapshot
        << ";burn_in=" << recipe.burn_in;
    ds.scheme = sch.str();
  }

  const bool burgers = std::holds_alternative<Burgers>(recipe.spec.variant);
  std::vector<double> traj_param;
  for (double pv : recipe.param_values) {
    for (int k = 0; k < recipe.ics_per_param; ++k) traj_param.push_back(pv);
  }
  ds.trajectories.resize(traj_param.size());
  parallel_for(static_cast<int>(traj_param.size()), recipe.threads, [&](int index) {
    const PdeSpec spec = recipe.spec.with_parameter(traj_param[index]);
    const std::uint64_t ic_seed = mix64(recipe.seed, static_cast<std::uint64_t>(index));
    Field ic = burgers ? burgers_fourier_ic(recipe.grid, ic_seed)
                       : rd_random_ic(recipe.grid, ic_seed);
    ds.trajectories[index] =
        generate_trajectory(spec, ic, recipe.dt_num, recipe.steps_per_snapshot,
                            recipe.n_snapshots, recipe.burn_in);
  });
  return ds;
}

std::vector<double> sample_test_params(double lo, double hi,
                                       const std::vector<double>& excluded, int n,
                                       std::uint64_t seed, bool extrapolate) {
  if (!(hi > lo)) throw ConfigError("sample_test_params: hi must exceed lo");
  GaussianGen gen(mix64(seed, 0x7e57ULL));
  const double range = hi - lo;
  std::vector<double> out;
  out.reserve(n);
  while (static_cast<int>(out.size()) < n) {
    double p;
    if (extrapolate) {
      p = hi + (0.05 + 0.20 * gen.uniform01()) * range;
    } else {
      p = lo + gen.uniform01() * range;
      bool near = false;
      for (double e : excluded) {
        if (std::abs(p - e) < 0.01 * range) near = true;
      }
      if (near) continue;
    }
    out.push_back(p);
  }
  return out;
}

namespace {

constexpr char kMagic[4] = {'P', 'P', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

void check_homogeneous(const Dataset& ds) {
  if (ds.trajectories.empty()) return;
  const Trajectory& first = ds.trajectories.front();
  if (first.snapshots.size() < 2) throw ConfigError("trajectories need >= 2 snapshots");
  for (const Trajectory& t : ds.trajectories) {
    if (t.snapshots.size() != first.snapshots.size() ||
        t.dt_learn != first.dt_learn ||
        t.params.values.size() != first.params.values.size()) {
      throw ConfigError("dataset is not homogeneous across trajectories");
    }
    for (const Field& f : t.snapshots) {
      if (!f.same_shape(first.snapshots.front())) {
        throw ConfigError("dataset snapshots disagree on grid or channels");
      }
      if (f.diverged || !all_finite(f)) {
        throw DivergedError("refusing to store a diverged snapshot");
      }
    }
  }
}

std::string meta_path(const std::string& path) { return path + ".meta"; }

}  // namespace

void write_dataset(const Dataset& ds, const std::string& path) {
  check_homogeneous(ds);
  const bool empty = ds.trajectories.empty();
  const Grid2D grid = empty ? Grid2D{4, 4, 1.0, 1.0} : ds.grid();
  const int channels = empty ? 0 : ds.channels();
  const int n_snap = ds.n_snapshots();
  const int n_params =
      empty ? 0 : static_cast<int>(ds.trajectories.front().params.values.size());

  std::ostringstream os(std::ios::binary);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(channels));
  write_u32(os, static_cast<std::uint32_t>(grid.ny));
  write_u32(os, static_cast<std::uint32_t>(grid.nx));
  write_f64(os, grid.lx);
  write_f64(os, grid.ly);
  write_f64(os, empty ? 0.0 : ds.dt_learn());
  write_u32(os, static_cast<std::uint32_t>(ds.trajectories.size()));
  write_u32(os, static_cast<std::uint32_t>(n_snap));
  write_u32(os, static_cast<std::uint32_t>(n_params));

  std::vector<float> snap;
  for (const Trajectory& t : ds.trajectories) {
    for (double v : t.params.values) write_f64(os, v);
    for (const Field& f : t.snapshots) {
      snap.resize(f.data.size());
      for (std::size_t i = 0; i < f.data.size(); ++i) {
        snap[i] = static_cast<float>(f.data[i]);
      }
      write_f32_array(os, snap.data(), snap.size());
    }
  }
  atomic_write_file(path, os.str());

  std::ostringstream meta;
  meta << "system=" << ds.system << "\n";
  meta << "scheme=" << ds.scheme << "\n";
  meta << "seed=" << ds.seed << "\n";
  meta << "kind=" << ds.kind << "\n";
  meta << "param_names=";
  if (!empty) {
    const auto& names = ds.trajectories.front().params.names;
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) meta << ",";
      meta << names[i];
    }
  }
  meta << "\n";
  atomic_write_file(meta_path(path), meta.str());
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);

  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("bad magic: not a dataset file: " + path);
  }
  const std::uint32_t version = read_u32(is);
  if (version != kVersion) {
    throw IoError("unsupported dataset version " + std::to_string(version));
  }
  const std::uint32_t channels = read_u32(is);
  const std::uint32_t ny = read_u32(is);
  const std::uint32_t nx = read_u32(is);
  const double lx = read_f64(is);
  const double ly = read_f64(is);
  const double dt_learn = read_f64(is);
  const std::uint32_t n_traj = read_u32(is);
  const std::uint32_t n_snap = read_u32(is);
  const std::uint32_t n_params = read_u32(is);

  if (n_traj > 0) {
    if (channels < 1 || channels > 16 || nx < 4 || ny < 4 || nx > 65536 ||
        ny > 65536 || n_snap < 2) {
      throw IoError("dimension inconsistency in dataset header");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !(dt_learn > 0.0)) {
      throw IoError("dimension inconsistency in dataset header");
    }
  }

  Dataset ds;
  // sidecar is optional on read; missing names get placeholders
  std::vector<std::string> names;
  {
    std::ifstream ms(meta_path(path));
    if (ms) {
      std::string line;
      while (std::getline(ms, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "system") ds.system = val;
        else if (key == "scheme") ds.scheme = val;
        else if (key == "seed") ds.seed = std::strtoull(val.c_str(), nullptr, 10);
        else if (key == "kind") ds.kind = val;
        else if (key == "param_names" && !val.empty()) {
          std::stringstream ss(val);
          std::string tok;
          while (std::getline(ss, tok, ',')) names.push_back(tok);
        }
      }
    }
  }
  while (names.size() < n_params) {
    names.push_back("p" + std::to_string(names.size()));
  }

  const Grid2D grid = n_traj > 0 ? make_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly)
                                 : Grid2D{};
  std::vector<float> snap(static_cast<std::size_t>(channels) * nx * ny);
  for (std::uint32_t t = 0; t < n_traj; ++t) {
    Trajectory traj;
    traj.dt_learn = dt_learn;
    traj.params.names = names;
    for (std::uint32_t p = 0; p < n_params; ++p) {
      traj.params.values.push_back(read_f64(is));
    }
    for (std::uint32_t s = 0; s < n_snap; ++s) {
      read_f32_array(is, snap.data(), snap.size());
      Field f(grid, static_cast<int>(channels));
      for (std::size_t i = 0; i < snap.size(); ++i) f.data[i] = snap[i];
      traj.snapshots.push_back(std::move(f));
    }
    ds.trajectories.push_back(std::move(traj));
  }
  return ds;
}

}  // namespace ppnn
