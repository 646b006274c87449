#include "geoscan/scheduler.hpp"

#include "geoscan/lp.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace geoscan {

namespace {

constexpr double kRad2Deg = 180.0 / M_PI;
const Vec3 kNadir(0.0, 0.0, -1.0);

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double slew_angle_rad(const Vec3& a, const Vec3& b) {
    const double d = std::clamp(a.dot(b), -1.0, 1.0);
    return std::acos(d);
}

int bin_count(const SchedulerInstance& inst) {
    return static_cast<int>(std::ceil(inst.max_off_nadir_rad / inst.angle_bin_rad - 1e-12));
}

int bin_index(const SchedulerInstance& inst, double off_nadir_rad) {
    const int n = bin_count(inst);
    const int b = static_cast<int>(std::floor(off_nadir_rad / inst.angle_bin_rad));
    return std::clamp(b, 0, n - 1);
}

/// 0..3 for the four required spectral kinds, -1 otherwise.
int kind_index(std::optional<SensorKind> sensor) {
    if (!sensor) return -1;
    switch (*sensor) {
        case SensorKind::RgbNarrow: return 0;
        case SensorKind::RgbWide: return 1;
        case SensorKind::SwirNarrow: return 2;
        case SensorKind::SwirWide: return 3;
        default: return -1;
    }
}

SchedulerInstance normalized(const SchedulerInstance& instance) {
    SchedulerInstance inst = instance;
    std::sort(inst.satellites.begin(), inst.satellites.end(),
              [](const SchedSatellite& a, const SchedSatellite& b) { return a.id < b.id; });
    std::sort(inst.targets.begin(), inst.targets.end(),
              [](const ObservationTarget& a, const ObservationTarget& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < inst.satellites.size(); ++i)
        if (inst.satellites[i].id == inst.satellites[i - 1].id)
            throw std::invalid_argument("scheduler: duplicate satellite id");
    for (std::size_t i = 1; i < inst.targets.size(); ++i)
        if (inst.targets[i].id == inst.targets[i - 1].id)
            throw std::invalid_argument("scheduler: duplicate target id");
    for (const ObservationTarget& t : inst.targets) {
        if (!(t.window_end_s > t.window_start_s))
            throw std::invalid_argument("scheduler: target window must be nonempty");
        if (!(t.priority > 0.0))
            throw std::invalid_argument("scheduler: target priority must be positive");
    }
    return inst;
}

struct Geometry {
    double slot_center_s(const TimeGrid& grid, int slot) const {
        return (slot + 0.5) * grid.slot_duration_s;
    }
    // Line of sight in (along, cross, up) axes from the satellite to the
    // target on flat ground, and the off-nadir angle.
    static std::pair<Vec3, double> look(const SchedulerInstance& inst,
                                        const SchedSatellite& sat,
                                        const ObservationTarget& tgt, double t) {
        const double ground_pos = sat.along_track_offset_m +
                                  inst.chief.ground_track_speed_mps() * t;
        const double d_along = tgt.along_track_m - ground_pos;
        const double d_cross = tgt.cross_track_m;
        const double h = inst.chief.altitude_m();
        Vec3 los(d_along, d_cross, -h);
        los.normalize();
        const double off_nadir = std::atan2(std::hypot(d_along, d_cross), h);
        return {los, off_nadir};
    }
};

bool window_overlaps_slot(const ObservationTarget& tgt, const TimeGrid& grid, int slot) {
    const double s0 = slot * grid.slot_duration_s;
    const double s1 = s0 + grid.slot_duration_s;
    return tgt.window_start_s < s1 && tgt.window_end_s > s0;
}

}  // namespace

std::vector<FeasiblePointing> feasible_pointings(const SchedulerInstance& instance) {
    const SchedulerInstance inst = normalized(instance);
    std::vector<FeasiblePointing> out;
    Geometry geo;
    for (int k = 0; k < inst.grid.horizon_slots; ++k) {
        const double t = geo.slot_center_s(inst.grid, k);
        for (std::size_t s = 0; s < inst.satellites.size(); ++s) {
            for (std::size_t ti = 0; ti < inst.targets.size(); ++ti) {
                const ObservationTarget& tgt = inst.targets[ti];
                if (!window_overlaps_slot(tgt, inst.grid, k)) continue;
                const auto [los, angle] = Geometry::look(inst, inst.satellites[s], tgt, t);
                if (angle > inst.max_off_nadir_rad + 1e-12) continue;
                out.push_back({static_cast<int>(s), k, static_cast<int>(ti), angle, los});
            }
        }
    }
    return out;
}

double science_value(const Schedule& schedule, const SchedulerInstance& instance) {
    const SchedulerInstance inst = normalized(instance);
    std::map<int, std::size_t> sat_by_id;
    for (std::size_t s = 0; s < inst.satellites.size(); ++s)
        sat_by_id[inst.satellites[s].id] = s;
    std::map<int, std::size_t> tgt_by_id;
    for (std::size_t t = 0; t < inst.targets.size(); ++t) tgt_by_id[inst.targets[t].id] = t;

    // (target, slot) -> angle-bin mask and required-kind mask.
    std::map<std::pair<std::size_t, int>, std::pair<std::uint32_t, std::uint32_t>> cover;
    for (const PointingTask& task : schedule.tasks) {
        if (task.desaturate) continue;
        const auto it = tgt_by_id.find(task.target_id);
        if (it == tgt_by_id.end()) continue;
        auto& [bins, kinds] = cover[{it->second, task.slot}];
        bins |= 1u << bin_index(inst, task.off_nadir_rad);
        const auto sit = sat_by_id.find(task.satellite_id);
        if (sit != sat_by_id.end()) {
            const int kind = kind_index(inst.satellites[sit->second].sensor);
            if (kind >= 0) kinds |= 1u << kind;
        }
    }

    double value = 0.0;
    for (const auto& [key, masks] : cover) {
        const double priority = inst.targets[key.first].priority;
        value += priority * std::popcount(masks.first) * std::popcount(masks.second) / 4.0;
    }
    return value;
}

namespace {

// Per-cell observation options, ascending target index.
struct SolverTables {
    SchedulerInstance inst;
    int nsat = 0;
    int nslot = 0;
    int ntgt = 0;
    std::vector<std::vector<FeasiblePointing>> options;  // [slot * nsat + sat]
    std::vector<double> max_slew_rad;                    // per sat, per slot transition

    int cell(int slot, int sat) const { return slot * nsat + sat; }
};

SolverTables build_tables(const SchedulerInstance& instance) {
    SolverTables tb;
    tb.inst = normalized(instance);
    tb.nsat = static_cast<int>(tb.inst.satellites.size());
    tb.nslot = tb.inst.grid.horizon_slots;
    tb.ntgt = static_cast<int>(tb.inst.targets.size());
    tb.options.assign(static_cast<std::size_t>(tb.nsat * tb.nslot), {});
    for (const FeasiblePointing& fp : feasible_pointings(tb.inst))
        tb.options[static_cast<std::size_t>(tb.cell(fp.slot, fp.sat_index))].push_back(fp);
    tb.max_slew_rad.reserve(static_cast<std::size_t>(tb.nsat));
    for (const SchedSatellite& sat : tb.inst.satellites) {
        tb.max_slew_rad.push_back(sat.max_slew_rate_deg_s * tb.inst.grid.slot_duration_s /
                                  kRad2Deg);
        if (sat.initial_momentum_mNms > sat.momentum_capacity_mNms)
            throw InfeasibleInstance("scheduler: satellite " + std::to_string(sat.id) +
                                     " starts beyond its momentum capacity");
    }
    return tb;
}

struct SatState {
    Vec3 pointing = kNadir;
    double momentum = 0.0;
};

// Decision encoding per cell: kUndecided, kNone, kDesat, or an index into the
// cell's option list.
constexpr int kUndecided = -3;
constexpr int kDesat = -2;
constexpr int kNone = -1;

struct DfsContext {
    const SolverTables* tb = nullptr;
    std::vector<int> decision;
    std::vector<SatState> state;
    std::vector<std::uint32_t> bins;   // [tgt * nslot + slot]
    std::vector<std::uint32_t> kinds;  // [tgt * nslot + slot]
    double partial = 0.0;
    double incumbent = -1.0;
    std::vector<int> best;
    bool have_best = false;
    SolveStats stats;

    int tk(int tgt, int slot) const { return tgt * tb->nslot + slot; }

    double marginal(const FeasiblePointing& fp) const {
        const SchedulerInstance& inst = tb->inst;
        const int idx = tk(fp.target_index, fp.slot);
        const std::uint32_t b0 = bins[static_cast<std::size_t>(idx)];
        const std::uint32_t k0 = kinds[static_cast<std::size_t>(idx)];
        std::uint32_t b1 = b0 | (1u << bin_index(inst, fp.off_nadir_rad));
        std::uint32_t k1 = k0;
        const int kind =
            kind_index(inst.satellites[static_cast<std::size_t>(fp.sat_index)].sensor);
        if (kind >= 0) k1 |= 1u << kind;
        const double priority = inst.targets[static_cast<std::size_t>(fp.target_index)].priority;
        return priority *
               (std::popcount(b1) * std::popcount(k1) - std::popcount(b0) * std::popcount(k0)) /
               4.0;
    }
};

// LP relaxation bound on the best total value of any completion of the
// current partial assignment. Momentum and slew chains are relaxed away;
// the coverage-product objective is linearized exactly at integer points.
double node_bound(DfsContext& ctx, int from_cell) {
    const SolverTables& tb = *ctx.tb;
    const SchedulerInstance& inst = tb.inst;
    const int nbins = bin_count(inst);

    // Free x variables per undecided cell option.
    struct XVar {
        int cell;
        int option;
        int tkidx;
        int bin;
        int kind;  // -1 when the sensor adds no required-kind coverage
    };
    std::vector<XVar> xvars;
    std::vector<std::uint32_t> free_bins(ctx.bins.size(), 0);
    std::vector<std::uint32_t> free_kinds(ctx.kinds.size(), 0);
    for (int cell = from_cell; cell < tb.nsat * tb.nslot; ++cell) {
        const std::vector<FeasiblePointing>& opts = tb.options[static_cast<std::size_t>(cell)];
        for (std::size_t oi = 0; oi < opts.size(); ++oi) {
            const FeasiblePointing& fp = opts[oi];
            const int tkidx = ctx.tk(fp.target_index, fp.slot);
            const int bin = bin_index(inst, fp.off_nadir_rad);
            const int kind =
                kind_index(inst.satellites[static_cast<std::size_t>(fp.sat_index)].sensor);
            xvars.push_back({cell, static_cast<int>(oi), tkidx, bin, kind});
            free_bins[static_cast<std::size_t>(tkidx)] |= 1u << bin;
            if (kind >= 0) free_kinds[static_cast<std::size_t>(tkidx)] |= 1u << kind;
        }
    }

    // z variables for bins/kinds reachable through free x; fixed-achieved ones
    // are constants folded into the base value or the y rows.
    std::map<std::pair<int, int>, int> zbin_var;   // (tkidx, bin) -> var
    std::map<std::pair<int, int>, int> zkind_var;  // (tkidx, kind) -> var
    struct YVar {
        int tkidx;
        int zb = -1;  // -1 means the bin side is a fixed constant 1
        int zc = -1;
        double priority;
    };
    std::vector<YVar> yvars;
    double base = 0.0;

    int nvar = static_cast<int>(xvars.size());
    for (int t = 0; t < tb.ntgt; ++t) {
        const double priority = inst.targets[static_cast<std::size_t>(t)].priority;
        for (int k = 0; k < tb.nslot; ++k) {
            const int tkidx = ctx.tk(t, k);
            const std::uint32_t fixed_b = ctx.bins[static_cast<std::size_t>(tkidx)];
            const std::uint32_t fixed_k = ctx.kinds[static_cast<std::size_t>(tkidx)];
            const std::uint32_t free_b =
                free_bins[static_cast<std::size_t>(tkidx)] & ~fixed_b;
            const std::uint32_t free_k =
                free_kinds[static_cast<std::size_t>(tkidx)] & ~fixed_k;
            if ((fixed_b | free_b) == 0 || (fixed_k | free_k) == 0) continue;

            for (int b = 0; b < nbins; ++b) {
                if (free_b & (1u << b)) zbin_var[{tkidx, b}] = nvar++;
            }
            for (int c = 0; c < 4; ++c) {
                if (free_k & (1u << c)) zkind_var[{tkidx, c}] = nvar++;
            }
            for (int b = 0; b < nbins; ++b) {
                const bool b_fixed = fixed_b & (1u << b);
                const bool b_free = free_b & (1u << b);
                if (!b_fixed && !b_free) continue;
                for (int c = 0; c < 4; ++c) {
                    const bool c_fixed = fixed_k & (1u << c);
                    const bool c_free = free_k & (1u << c);
                    if (!c_fixed && !c_free) continue;
                    if (b_fixed && c_fixed) {
                        base += priority / 4.0;
                    } else {
                        YVar y;
                        y.tkidx = tkidx;
                        y.priority = priority;
                        if (!b_fixed) y.zb = zbin_var[{tkidx, b}];
                        if (!c_fixed) y.zc = zkind_var[{tkidx, c}];
                        yvars.push_back(y);
                    }
                }
            }
        }
    }

    if (yvars.empty()) return base;  // nothing left to gain; bound is exact

    const int ny = static_cast<int>(yvars.size());
    const int ntotal = nvar + ny;

    // Rows: one-task-per-undecided-cell, z <= coverage sum, z <= 1, y <= z.
    int nrows = 0;
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> rhs;
    auto add_row = [&](std::vector<std::pair<int, double>> entries, double b) {
        rows.push_back(std::move(entries));
        rhs.push_back(b);
        ++nrows;
    };

    // One task per undecided cell.
    {
        std::map<int, std::vector<int>> by_cell;
        for (std::size_t xi = 0; xi < xvars.size(); ++xi)
            by_cell[xvars[xi].cell].push_back(static_cast<int>(xi));
        for (const auto& [cell, vars] : by_cell) {
            std::vector<std::pair<int, double>> row;
            for (int xi : vars) row.push_back({xi, 1.0});
            add_row(std::move(row), 1.0);
        }
    }
    // z_b <= sum of x hitting that bin; z_b <= 1.
    for (const auto& [key, zv] : zbin_var) {
        std::vector<std::pair<int, double>> row{{zv, 1.0}};
        for (std::size_t xi = 0; xi < xvars.size(); ++xi)
            if (xvars[xi].tkidx == key.first && xvars[xi].bin == key.second)
                row.push_back({static_cast<int>(xi), -1.0});
        add_row(std::move(row), 0.0);
        add_row({{zv, 1.0}}, 1.0);
    }
    for (const auto& [key, zv] : zkind_var) {
        std::vector<std::pair<int, double>> row{{zv, 1.0}};
        for (std::size_t xi = 0; xi < xvars.size(); ++xi)
            if (xvars[xi].tkidx == key.first && xvars[xi].kind == key.second)
                row.push_back({static_cast<int>(xi), -1.0});
        add_row(std::move(row), 0.0);
        add_row({{zv, 1.0}}, 1.0);
    }
    // y <= z sides (skipped where the side is a fixed constant).
    for (int yi = 0; yi < ny; ++yi) {
        const YVar& y = yvars[static_cast<std::size_t>(yi)];
        const int yvar = nvar + yi;
        if (y.zb >= 0) add_row({{yvar, 1.0}, {y.zb, -1.0}}, 0.0);
        if (y.zc >= 0) add_row({{yvar, 1.0}, {y.zc, -1.0}}, 0.0);
        if (y.zb < 0 && y.zc < 0) add_row({{yvar, 1.0}}, 1.0);
    }

    LpProblem lp;
    lp.a_ub.setZero(nrows, ntotal);
    lp.b_ub.resize(nrows);
    for (int r = 0; r < nrows; ++r) {
        for (const auto& [cvar, coeff] : rows[static_cast<std::size_t>(r)])
            lp.a_ub(r, cvar) = coeff;
        lp.b_ub(r) = rhs[static_cast<std::size_t>(r)];
    }
    lp.a_eq.setZero(0, ntotal);
    lp.b_eq.resize(0);
    lp.c = Eigen::VectorXd::Zero(ntotal);
    for (int yi = 0; yi < ny; ++yi)
        lp.c(nvar + yi) = -yvars[static_cast<std::size_t>(yi)].priority / 4.0;

    ++ctx.stats.lp_solves;
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
        return std::numeric_limits<double>::infinity();  // never prune on a failed bound
    return base - sol.objective;
}

double dfs(DfsContext& ctx, int cell) {
    const SolverTables& tb = *ctx.tb;
    const int ncells = tb.nsat * tb.nslot;
    ++ctx.stats.nodes;

    if (cell == ncells) {
        if (ctx.partial > ctx.incumbent + 1e-12) {
            ctx.incumbent = ctx.partial;
            ctx.best = ctx.decision;
            ctx.have_best = true;
        }
        return ctx.partial;
    }

    const double bound = node_bound(ctx, cell);
    if (cell == 0) ctx.stats.root_bound = bound;
    if (bound <= ctx.incumbent + 1e-9) return -std::numeric_limits<double>::infinity();

    const int sat = cell % tb.nsat;
    const SchedSatellite& sdef = tb.inst.satellites[static_cast<std::size_t>(sat)];
    const std::vector<FeasiblePointing>& opts = tb.options[static_cast<std::size_t>(cell)];
    double subtree_best = -std::numeric_limits<double>::infinity();

    // Observation options first (ascending target), then idle, then
    // desaturation.
    for (std::size_t oi = 0; oi < opts.size(); ++oi) {
        const FeasiblePointing& fp = opts[oi];
        SatState& st = ctx.state[static_cast<std::size_t>(sat)];
        const double slew = slew_angle_rad(st.pointing, fp.los);
        if (slew > tb.max_slew_rad[static_cast<std::size_t>(sat)] + 1e-12) continue;
        const double dm = tb.inst.momentum_per_slew_mNms_per_deg * slew * kRad2Deg;
        if (st.momentum + dm > sdef.momentum_capacity_mNms + 1e-9) continue;

        const SatState saved = st;
        const int tkidx = ctx.tk(fp.target_index, fp.slot);
        const std::uint32_t saved_bins = ctx.bins[static_cast<std::size_t>(tkidx)];
        const std::uint32_t saved_kinds = ctx.kinds[static_cast<std::size_t>(tkidx)];
        const double gain = ctx.marginal(fp);

        st.momentum += dm;
        st.pointing = fp.los;
        ctx.bins[static_cast<std::size_t>(tkidx)] |= 1u << bin_index(tb.inst, fp.off_nadir_rad);
        const int kind = kind_index(sdef.sensor);
        if (kind >= 0) ctx.kinds[static_cast<std::size_t>(tkidx)] |= 1u << kind;
        ctx.partial += gain;
        ctx.decision[static_cast<std::size_t>(cell)] = static_cast<int>(oi);

        subtree_best = std::max(subtree_best, dfs(ctx, cell + 1));

        ctx.decision[static_cast<std::size_t>(cell)] = kUndecided;
        ctx.partial -= gain;
        ctx.bins[static_cast<std::size_t>(tkidx)] = saved_bins;
        ctx.kinds[static_cast<std::size_t>(tkidx)] = saved_kinds;
        st = saved;
    }

    // Idle.
    ctx.decision[static_cast<std::size_t>(cell)] = kNone;
    subtree_best = std::max(subtree_best, dfs(ctx, cell + 1));
    ctx.decision[static_cast<std::size_t>(cell)] = kUndecided;

    // Desaturate, unless it would be a no-op.
    {
        SatState& st = ctx.state[static_cast<std::size_t>(sat)];
        if (st.momentum > 0.0 || (st.pointing - kNadir).squaredNorm() > 0.0) {
            const SatState saved = st;
            st.momentum = 0.0;
            st.pointing = kNadir;
            ctx.decision[static_cast<std::size_t>(cell)] = kDesat;
            subtree_best = std::max(subtree_best, dfs(ctx, cell + 1));
            ctx.decision[static_cast<std::size_t>(cell)] = kUndecided;
            st = saved;
        }
    }

    if (std::isfinite(subtree_best)) {
        const double violation = subtree_best - bound;
        ctx.stats.max_bound_violation = std::max(ctx.stats.max_bound_violation, violation);
    }
    return subtree_best;
}

// Replays a decision vector into a Schedule with slews and momentum filled in.
Schedule replay_decisions(const SolverTables& tb, const std::vector<int>& decision) {
    Schedule sched;
    std::vector<SatState> state(static_cast<std::size_t>(tb.nsat));
    for (int s = 0; s < tb.nsat; ++s)
        state[static_cast<std::size_t>(s)].momentum =
            tb.inst.satellites[static_cast<std::size_t>(s)].initial_momentum_mNms;
    sched.momentum_mNms.assign(static_cast<std::size_t>(tb.nsat),
                               std::vector<double>(static_cast<std::size_t>(tb.nslot), 0.0));

    for (int k = 0; k < tb.nslot; ++k) {
        for (int s = 0; s < tb.nsat; ++s) {
            const int cell = tb.cell(k, s);
            const int d = decision[static_cast<std::size_t>(cell)];
            SatState& st = state[static_cast<std::size_t>(s)];
            if (d == kDesat) {
                PointingTask task;
                task.satellite_id = tb.inst.satellites[static_cast<std::size_t>(s)].id;
                task.slot = k;
                task.desaturate = true;
                task.slew_from_previous_rad = 0.0;
                sched.tasks.push_back(task);
                st.momentum = 0.0;
                st.pointing = kNadir;
                ++sched.desat_count;
            } else if (d >= 0) {
                const FeasiblePointing& fp =
                    tb.options[static_cast<std::size_t>(cell)][static_cast<std::size_t>(d)];
                PointingTask task;
                task.satellite_id = tb.inst.satellites[static_cast<std::size_t>(s)].id;
                task.slot = k;
                task.target_id = tb.inst.targets[static_cast<std::size_t>(fp.target_index)].id;
                task.off_nadir_rad = fp.off_nadir_rad;
                task.slew_from_previous_rad = slew_angle_rad(st.pointing, fp.los);
                sched.tasks.push_back(task);
                st.momentum += tb.inst.momentum_per_slew_mNms_per_deg *
                               task.slew_from_previous_rad * kRad2Deg;
                st.pointing = fp.los;
            }
            sched.momentum_mNms[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)] =
                st.momentum;
        }
    }
    sched.objective_value = science_value(sched, tb.inst);
    return sched;
}

}  // namespace

Schedule solve_greedy(const SchedulerInstance& instance) {
    const SolverTables tb = build_tables(instance);
    std::vector<int> decision(static_cast<std::size_t>(tb.nsat * tb.nslot), kNone);
    std::vector<SatState> state(static_cast<std::size_t>(tb.nsat));
    for (int s = 0; s < tb.nsat; ++s)
        state[static_cast<std::size_t>(s)].momentum =
            tb.inst.satellites[static_cast<std::size_t>(s)].initial_momentum_mNms;

    std::vector<std::uint32_t> bins(static_cast<std::size_t>(tb.ntgt * tb.nslot), 0);
    std::vector<std::uint32_t> kinds(static_cast<std::size_t>(tb.ntgt * tb.nslot), 0);

    for (int k = 0; k < tb.nslot; ++k) {
        std::vector<bool> busy(static_cast<std::size_t>(tb.nsat), false);

        // Threshold desaturation first.
        for (int s = 0; s < tb.nsat; ++s) {
            const SchedSatellite& sdef = tb.inst.satellites[static_cast<std::size_t>(s)];
            SatState& st = state[static_cast<std::size_t>(s)];
            if (st.momentum >= tb.inst.desat_threshold_fraction * sdef.momentum_capacity_mNms) {
                decision[static_cast<std::size_t>(tb.cell(k, s))] = kDesat;
                st.momentum = 0.0;
                st.pointing = kNadir;
                busy[static_cast<std::size_t>(s)] = true;
            }
        }

        // Repeatedly take the highest positive marginal gain.
        while (true) {
            double best_gain = 0.0;
            int best_sat = -1;
            int best_opt = -1;
            for (int s = 0; s < tb.nsat; ++s) {
                if (busy[static_cast<std::size_t>(s)]) continue;
                const SchedSatellite& sdef = tb.inst.satellites[static_cast<std::size_t>(s)];
                const SatState& st = state[static_cast<std::size_t>(s)];
                const std::vector<FeasiblePointing>& opts =
                    tb.options[static_cast<std::size_t>(tb.cell(k, s))];
                for (std::size_t oi = 0; oi < opts.size(); ++oi) {
                    const FeasiblePointing& fp = opts[oi];
                    const double slew = slew_angle_rad(st.pointing, fp.los);
                    if (slew > tb.max_slew_rad[static_cast<std::size_t>(s)] + 1e-12) continue;
                    const double dm =
                        tb.inst.momentum_per_slew_mNms_per_deg * slew * kRad2Deg;
                    if (st.momentum + dm > sdef.momentum_capacity_mNms + 1e-9) continue;

                    const int tkidx = fp.target_index * tb.nslot + k;
                    const std::uint32_t b0 = bins[static_cast<std::size_t>(tkidx)];
                    const std::uint32_t k0 = kinds[static_cast<std::size_t>(tkidx)];
                    std::uint32_t b1 = b0 | (1u << bin_index(tb.inst, fp.off_nadir_rad));
                    std::uint32_t k1 = k0;
                    const int kind = kind_index(sdef.sensor);
                    if (kind >= 0) k1 |= 1u << kind;
                    const double gain =
                        tb.inst.targets[static_cast<std::size_t>(fp.target_index)].priority *
                        (std::popcount(b1) * std::popcount(k1) -
                         std::popcount(b0) * std::popcount(k0)) /
                        4.0;
                    if (gain > best_gain + 1e-12) {
                        best_gain = gain;
                        best_sat = s;
                        best_opt = static_cast<int>(oi);
                    }
                }
            }
            if (best_sat < 0) break;

            const FeasiblePointing& fp =
                tb.options[static_cast<std::size_t>(tb.cell(k, best_sat))]
                          [static_cast<std::size_t>(best_opt)];
            SatState& st = state[static_cast<std::size_t>(best_sat)];
            const double slew = slew_angle_rad(st.pointing, fp.los);
            st.momentum += tb.inst.momentum_per_slew_mNms_per_deg * slew * kRad2Deg;
            st.pointing = fp.los;
            const int tkidx = fp.target_index * tb.nslot + k;
            bins[static_cast<std::size_t>(tkidx)] |=
                1u << bin_index(tb.inst, fp.off_nadir_rad);
            const int kind =
                kind_index(tb.inst.satellites[static_cast<std::size_t>(best_sat)].sensor);
            if (kind >= 0) kinds[static_cast<std::size_t>(tkidx)] |= 1u << kind;
            decision[static_cast<std::size_t>(tb.cell(k, best_sat))] = best_opt;
            busy[static_cast<std::size_t>(best_sat)] = true;
        }
    }
    return replay_decisions(tb, decision);
}

Schedule solve_exact(const SchedulerInstance& instance, SolveStats* stats) {
    const SolverTables tb = build_tables(instance);
    const long problem_size =
        static_cast<long>(tb.nsat) * tb.nslot * std::max(tb.ntgt, 1);
    if (problem_size > tb.inst.exact_cap_vars)
        throw InstanceTooLarge("solve_exact: satellites x slots x targets = " +
                               std::to_string(problem_size) + " exceeds the cap of " +
                               std::to_string(tb.inst.exact_cap_vars));

    // Greedy warm start gives the incumbent a sound lower bound.
    const Schedule greedy = solve_greedy(tb.inst);

    DfsContext ctx;
    ctx.tb = &tb;
    ctx.decision.assign(static_cast<std::size_t>(tb.nsat * tb.nslot), kUndecided);
    ctx.state.assign(static_cast<std::size_t>(tb.nsat), {});
    for (int s = 0; s < tb.nsat; ++s)
        ctx.state[static_cast<std::size_t>(s)].momentum =
            tb.inst.satellites[static_cast<std::size_t>(s)].initial_momentum_mNms;
    ctx.bins.assign(static_cast<std::size_t>(std::max(1, tb.ntgt * tb.nslot)), 0);
    ctx.kinds.assign(static_cast<std::size_t>(std::max(1, tb.ntgt * tb.nslot)), 0);
    ctx.incumbent = greedy.objective_value - 1e-9;

    dfs(ctx, 0);
    if (stats != nullptr) *stats = ctx.stats;

    if (!ctx.have_best) return greedy;  // greedy already optimal
    return replay_decisions(tb, ctx.best);
}

std::vector<Finding> validate_schedule(const Schedule& schedule,
                                       const SchedulerInstance& instance) {
    std::vector<Finding> out;
    const SolverTables tb = build_tables(instance);

    std::map<int, int> sat_index;
    for (int s = 0; s < tb.nsat; ++s)
        sat_index[tb.inst.satellites[static_cast<std::size_t>(s)].id] = s;
    std::map<int, int> tgt_index;
    for (int t = 0; t < tb.ntgt; ++t)
        tgt_index[tb.inst.targets[static_cast<std::size_t>(t)].id] = t;

    // Index tasks by (slot, sat) and catch duplicates.
    std::map<std::pair<int, int>, const PointingTask*> by_cell;
    for (const PointingTask& task : schedule.tasks) {
        const std::string subject =
            "sat " + std::to_string(task.satellite_id) + " slot " + std::to_string(task.slot);
        const auto sit = sat_index.find(task.satellite_id);
        if (sit == sat_index.end()) {
            out.push_back({Severity::Error, "unknown_satellite", subject,
                           "task references a satellite not in the instance"});
            continue;
        }
        if (task.slot < 0 || task.slot >= tb.nslot) {
            out.push_back({Severity::Error, "slot_range", subject, "slot outside the horizon"});
            continue;
        }
        const auto [it, inserted] = by_cell.insert({{task.slot, sit->second}, &task});
        if (!inserted)
            out.push_back({Severity::Error, "duplicate_assignment", subject,
                           "more than one task in this satellite-slot"});
        if (!task.desaturate && tgt_index.find(task.target_id) == tgt_index.end())
            out.push_back({Severity::Error, "unknown_target", subject,
                           "task references a target not in the instance"});
    }

    // Momentum and slew replay from the viewing geometry.
    std::vector<SatState> state(static_cast<std::size_t>(tb.nsat));
    for (int s = 0; s < tb.nsat; ++s)
        state[static_cast<std::size_t>(s)].momentum =
            tb.inst.satellites[static_cast<std::size_t>(s)].initial_momentum_mNms;

    for (int k = 0; k < tb.nslot; ++k) {
        for (int s = 0; s < tb.nsat; ++s) {
            const auto it = by_cell.find({k, s});
            SatState& st = state[static_cast<std::size_t>(s)];
            const SchedSatellite& sdef = tb.inst.satellites[static_cast<std::size_t>(s)];
            const std::string subject =
                "sat " + std::to_string(sdef.id) + " slot " + std::to_string(k);
            if (it == by_cell.end()) {
                // idle: pointing held, no accrual
            } else if (it->second->desaturate) {
                st.momentum = 0.0;
                st.pointing = kNadir;
            } else {
                const PointingTask& task = *it->second;
                const int t = tgt_index.count(task.target_id) ? tgt_index[task.target_id] : -1;
                const FeasiblePointing* fp = nullptr;
                if (t >= 0) {
                    for (const FeasiblePointing& cand :
                         tb.options[static_cast<std::size_t>(tb.cell(k, s))]) {
                        if (cand.target_index == t) {
                            fp = &cand;
                            break;
                        }
                    }
                }
                if (fp == nullptr) {
                    out.push_back({Severity::Error, "infeasible_pointing", subject,
                                   "assignment is outside the feasibility relation"});
                    continue;
                }
                if (std::abs(task.off_nadir_rad - fp->off_nadir_rad) > 1e-9)
                    out.push_back({Severity::Error, "angle_mismatch", subject,
                                   "recorded off-nadir angle does not match the geometry"});
                const double slew = slew_angle_rad(st.pointing, fp->los);
                if (std::abs(task.slew_from_previous_rad - slew) > 1e-9)
                    out.push_back({Severity::Error, "slew_mismatch", subject,
                                   "recorded slew does not match the pointing history"});
                if (slew > tb.max_slew_rad[static_cast<std::size_t>(s)] + 1e-9)
                    out.push_back({Severity::Error, "slew_rate", subject,
                                   "slew exceeds the per-slot slew-rate limit"});
                st.momentum +=
                    tb.inst.momentum_per_slew_mNms_per_deg * slew * kRad2Deg;
                st.pointing = fp->los;
                if (st.momentum > sdef.momentum_capacity_mNms + 1e-9)
                    out.push_back({Severity::Error, "momentum_capacity", subject,
                                   "wheel momentum " + fmt(st.momentum) +
                                       " mNms exceeds capacity"});
            }
            if (!schedule.momentum_mNms.empty()) {
                if (s < static_cast<int>(schedule.momentum_mNms.size()) &&
                    k < static_cast<int>(
                            schedule.momentum_mNms[static_cast<std::size_t>(s)].size())) {
                    const double recorded =
                        schedule.momentum_mNms[static_cast<std::size_t>(s)]
                                              [static_cast<std::size_t>(k)];
                    if (std::abs(recorded - st.momentum) > 1e-9)
                        out.push_back({Severity::Error, "momentum_mismatch", subject,
                                       "recorded momentum trajectory deviates from replay"});
                }
            }
        }
    }

    const double recomputed = science_value(schedule, instance);
    if (std::abs(recomputed - schedule.objective_value) > 1e-9)
        out.push_back({Severity::Error, "objective_mismatch", "schedule",
                       "recorded objective " + fmt(schedule.objective_value) +
                           " differs from recomputed " + fmt(recomputed)});
    return out;
}

using nlohmann::json;

std::string instance_to_json_text(const SchedulerInstance& instance) {
    json root;
    root["chief"] = {{"semi_major_axis_m", instance.chief.semi_major_axis_m}};
    root["grid"] = {{"slot_duration_s", instance.grid.slot_duration_s},
                    {"horizon_slots", instance.grid.horizon_slots}};
    root["params"] = {{"max_off_nadir_rad", instance.max_off_nadir_rad},
                      {"angle_bin_rad", instance.angle_bin_rad},
                      {"momentum_per_slew_mNms_per_deg", instance.momentum_per_slew_mNms_per_deg},
                      {"desat_threshold_fraction", instance.desat_threshold_fraction},
                      {"desat_impulse_Ns", instance.desat_impulse_Ns},
                      {"exact_cap_vars", instance.exact_cap_vars}};
    root["satellites"] = json::array();
    for (const SchedSatellite& s : instance.satellites) {
        json sj;
        sj["id"] = s.id;
        if (s.sensor) sj["sensor"] = sensor_info(*s.sensor).name;
        sj["along_track_offset_m"] = s.along_track_offset_m;
        sj["momentum_capacity_mNms"] = s.momentum_capacity_mNms;
        sj["initial_momentum_mNms"] = s.initial_momentum_mNms;
        sj["max_slew_rate_deg_s"] = s.max_slew_rate_deg_s;
        root["satellites"].push_back(sj);
    }
    root["targets"] = json::array();
    for (const ObservationTarget& t : instance.targets) {
        root["targets"].push_back({{"id", t.id},
                                   {"along_track_m", t.along_track_m},
                                   {"cross_track_m", t.cross_track_m},
                                   {"window_s", {t.window_start_s, t.window_end_s}},
                                   {"priority", t.priority}});
    }
    return root.dump(2);
}

SchedulerInstance instance_from_json_text(const std::string& text) {
    const json root = json::parse(text);
    SchedulerInstance inst;
    inst.chief = ChiefOrbit(root.at("chief").at("semi_major_axis_m").get<double>());
    inst.grid.slot_duration_s = root.at("grid").at("slot_duration_s").get<double>();
    inst.grid.horizon_slots = root.at("grid").at("horizon_slots").get<int>();
    const json& p = root.at("params");
    inst.max_off_nadir_rad = p.at("max_off_nadir_rad").get<double>();
    inst.angle_bin_rad = p.at("angle_bin_rad").get<double>();
    inst.momentum_per_slew_mNms_per_deg = p.at("momentum_per_slew_mNms_per_deg").get<double>();
    inst.desat_threshold_fraction = p.at("desat_threshold_fraction").get<double>();
    inst.desat_impulse_Ns = p.at("desat_impulse_Ns").get<double>();
    inst.exact_cap_vars = p.at("exact_cap_vars").get<int>();
    for (const json& sj : root.at("satellites")) {
        SchedSatellite s;
        s.id = sj.at("id").get<int>();
        if (sj.contains("sensor")) s.sensor = sensor_kind_from_name(sj["sensor"]);
        s.along_track_offset_m = sj.at("along_track_offset_m").get<double>();
        s.momentum_capacity_mNms = sj.at("momentum_capacity_mNms").get<double>();
        s.initial_momentum_mNms = sj.at("initial_momentum_mNms").get<double>();
        s.max_slew_rate_deg_s = sj.at("max_slew_rate_deg_s").get<double>();
        inst.satellites.push_back(s);
    }
    for (const json& tj : root.at("targets")) {
        ObservationTarget t;
        t.id = tj.at("id").get<int>();
        t.along_track_m = tj.at("along_track_m").get<double>();
        t.cross_track_m = tj.at("cross_track_m").get<double>();
        t.window_start_s = tj.at("window_s")[0].get<double>();
        t.window_end_s = tj.at("window_s")[1].get<double>();
        t.priority = tj.at("priority").get<double>();
        inst.targets.push_back(t);
    }
    return inst;
}

std::string schedule_to_json_text(const Schedule& schedule) {
    json root;
    root["objective_value"] = schedule.objective_value;
    root["desat_count"] = schedule.desat_count;
    root["tasks"] = json::array();
    for (const PointingTask& task : schedule.tasks) {
        json tj;
        tj["slot"] = task.slot;
        tj["satellite_id"] = task.satellite_id;
        if (task.desaturate) {
            tj["action"] = "DESAT";
        } else {
            tj["action"] = "observe";
            tj["target_id"] = task.target_id;
        }
        tj["off_nadir_deg"] = task.off_nadir_rad * kRad2Deg;
        tj["slew_deg"] = task.slew_from_previous_rad * kRad2Deg;
        root["tasks"].push_back(tj);
    }
    root["momentum_mNms"] = schedule.momentum_mNms;
    return root.dump(2);
}

std::string schedule_to_csv(const Schedule& schedule, const SchedulerInstance& instance) {
    const SchedulerInstance inst = normalized(instance);
    std::ostringstream out;
    out << "slot,satellite_id,target,off_nadir_deg,momentum_mNms,marginal_value\n";

    std::map<int, std::size_t> sat_pos;
    for (std::size_t s = 0; s < inst.satellites.size(); ++s)
        sat_pos[inst.satellites[s].id] = s;

    // Marginal value = objective gain of each task replayed in (slot, sat) order.
    Schedule partial;
    double prev_value = 0.0;
    std::vector<PointingTask> ordered = schedule.tasks;
    std::sort(ordered.begin(), ordered.end(), [](const PointingTask& a, const PointingTask& b) {
        return a.slot != b.slot ? a.slot < b.slot : a.satellite_id < b.satellite_id;
    });
    for (const PointingTask& task : ordered) {
        partial.tasks.push_back(task);
        double marginal = 0.0;
        if (!task.desaturate) {
            const double v = science_value(partial, inst);
            marginal = v - prev_value;
            prev_value = v;
        }
        double momentum = 0.0;
        const auto it = sat_pos.find(task.satellite_id);
        if (it != sat_pos.end() && it->second < schedule.momentum_mNms.size() &&
            static_cast<std::size_t>(task.slot) < schedule.momentum_mNms[it->second].size())
            momentum = schedule.momentum_mNms[it->second][static_cast<std::size_t>(task.slot)];
        out << task.slot << ',' << task.satellite_id << ','
            << (task.desaturate ? std::string("DESAT") : std::to_string(task.target_id)) << ','
            << fmt(task.off_nadir_rad * kRad2Deg) << ',' << fmt(momentum) << ','
            << fmt(marginal) << '\n';
    }
    return out.str();
}

}  // namespace geoscan
