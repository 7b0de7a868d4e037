#include "mel/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mel/parallel.hpp"
#include "mel/rng.hpp"

namespace mel {

namespace {

int gi(Gender g) { return g == Gender::M ? 0 : 1; }
int si(Skill s) { return s == Skill::H ? 0 : 1; }

struct Pool {
    std::vector<std::uint8_t> high;   // skill per slot, fixed by the stratified type
    std::vector<double> birth;        // current generation's birth time
    std::vector<double> last_meeting; // for inter-meeting gap collection
    int n_high = 0;

    void init(int n, double cutoff) {
        high.resize(n);
        birth.assign(n, 0.0);
        last_meeting.assign(n, 0.0);
        n_high = 0;
        for (int i = 0; i < n; ++i) {
            double tau = (i + 0.5) / n;
            high[i] = tau <= cutoff ? 1 : 0;
            n_high += high[i];
        }
    }
};

struct ClassAccum {
    double sum = 0.0;       // discounted payoffs of eligible generations
    long births = 0;        // eligible generations born
    long completions = 0;

    double mean() const { return births > 0 ? sum / births : 0.0; }
};

// mutual acceptance at a meeting; high partners are always accepted
bool accepts(const AcceptancePair& own, Skill own_skill, Skill partner_skill, CounterRng& rng) {
    if (partner_skill == Skill::H) return true;
    double a = own.at(own_skill);
    return rng.next_bernoulli(a);
}

struct Replication {
    ClassAccum cls[2][2];
    long matches = 0;
    double share_m = 0.0, share_w = 0.0;
};

struct DeviantState {
    Skill skill = Skill::L;
    double accept_low = 1.0;
    double birth = 0.0;
    ClassAccum acc;
};

Replication run_replication(const SimConfig& cfg, int rep, std::vector<double>* gaps,
                            const DeviationSpec* dev, ClassAccum* dev_acc, int n_dev) {
    const Economy& e = cfg.economy;
    const int n = cfg.n_agents;
    CounterRng rng(cfg.seed, static_cast<std::uint64_t>(rep));

    Pool men, women;
    men.init(n, cfg.profile.theta_m);
    women.init(n, cfg.profile.theta_w);

    // generations born in [0, window] have at least 10/r of runway; later
    // births are excluded from the estimator
    const double window = std::max(0.0, cfg.horizon - 10.0 / e.r);

    Replication out;
    out.share_m = static_cast<double>(men.n_high) / n;
    out.share_w = static_cast<double>(women.n_high) / n;
    for (int g = 0; g < 2; ++g) {
        const Pool& p = g == 0 ? men : women;
        for (int i = 0; i < n; ++i) ++out.cls[g][p.high[i] ? 0 : 1].births;
    }

    std::vector<DeviantState> deviants;
    if (dev != nullptr) {
        Skill conformist = dev->type_tau <= cfg.profile.theta(dev->gender) ? Skill::H : Skill::L;
        Skill s = dev->flip_invest ? (conformist == Skill::H ? Skill::L : Skill::H) : conformist;
        double accept = cfg.profile.accept(dev->gender).at(s);
        if (dev->accept_low_override >= 0.0) accept = dev->accept_low_override;
        deviants.assign(n_dev, DeviantState{s, accept, 0.0, {}});
        for (auto& d : deviants) ++d.acc.births;
    }

    const double market_rate = e.lambda * n;
    const double deviant_rate = e.lambda * static_cast<double>(deviants.size());
    double t = 0.0;
    double t_market = rng.next_exponential(market_rate);
    double t_dev = deviants.empty() ? std::numeric_limits<double>::infinity()
                                    : rng.next_exponential(deviant_rate);

    // Gaps are recorded only when they START early enough that censoring at
    // the horizon is negligible (mass e^-10); completion-based collection
    // would length-bias the sample.
    const double gap_window =
        std::min(cfg.horizon - 10.0 / e.lambda, 20000.0 / (e.lambda * n));

    auto settle = [&](Pool& pool, int g, int idx, Skill partner_skill, double now) {
        Skill own = pool.high[idx] ? Skill::H : Skill::L;
        if (pool.birth[idx] <= window) {
            double pay = e.phi.at(own, partner_skill) * std::exp(-e.r * (now - pool.birth[idx]));
            ClassAccum& acc = out.cls[g][si(own)];
            acc.sum += pay;
            ++acc.completions;
        }
        pool.birth[idx] = now;  // clone of the same type, fresh investment
        if (now <= window) ++out.cls[g][si(own)].births;
    };

    while (true) {
        bool market_next = t_market <= t_dev;
        double t_next = market_next ? t_market : t_dev;
        if (t_next > cfg.horizon) break;
        t = t_next;
        if (market_next) {
            int im = static_cast<int>(rng.next_below(n));
            int iw = static_cast<int>(rng.next_below(n));
            if (gaps != nullptr && men.last_meeting[im] <= gap_window) {
                gaps->push_back(t - men.last_meeting[im]);
            }
            men.last_meeting[im] = t;
            women.last_meeting[iw] = t;
            Skill sm = men.high[im] ? Skill::H : Skill::L;
            Skill sw = women.high[iw] ? Skill::H : Skill::L;
            bool ok_m = accepts(cfg.profile.accept_m, sm, sw, rng);
            bool ok_w = accepts(cfg.profile.accept_w, sw, sm, rng);
            if (ok_m && ok_w) {
                ++out.matches;
                settle(men, 0, im, sw, t);
                settle(women, 1, iw, sm, t);
            }
            t_market = t + rng.next_exponential(market_rate);
        } else {
            int id = static_cast<int>(rng.next_below(deviants.size()));
            DeviantState& d = deviants[id];
            const Pool& opposite = dev->gender == Gender::M ? women : men;
            int ip = static_cast<int>(rng.next_below(n));
            Skill sp = opposite.high[ip] ? Skill::H : Skill::L;
            bool ok_dev = sp == Skill::H || rng.next_bernoulli(d.accept_low);
            const AcceptancePair& opp_accept =
                dev->gender == Gender::M ? cfg.profile.accept_w : cfg.profile.accept_m;
            bool ok_partner = d.skill == Skill::H || rng.next_bernoulli(opp_accept.at(sp));
            if (ok_dev && ok_partner) {
                if (d.birth <= window) {
                    d.acc.sum += e.phi.at(d.skill, sp) * std::exp(-e.r * (t - d.birth));
                    ++d.acc.completions;
                }
                d.birth = t;  // respawn; the partner stays in the pool
                if (t <= window) ++d.acc.births;
            }
            t_dev = t + rng.next_exponential(deviant_rate);
        }
    }

    if (dev_acc != nullptr) {
        for (const auto& d : deviants) {
            dev_acc->sum += d.acc.sum;
            dev_acc->births += d.acc.births;
            dev_acc->completions += d.acc.completions;
        }
    }
    return out;
}

double phi_max(const Economy& e) { return e.phi.max_abs(); }

}  // namespace

void SimConfig::validate() const {
    economy.validate();
    profile.validate();
    if (n_agents < 100) throw ConfigError("simulate: n_agents must be >= 100");
    if (!(horizon >= 10.0 / economy.r - 1e-12))
        throw ConfigError("simulate: horizon must be >= 10/r");
    if (n_replications < 1) throw ConfigError("simulate: n_replications must be >= 1");
}

SimResult simulate_market(const SimConfig& cfg) {
    cfg.validate();
    const int reps = cfg.n_replications;
    std::vector<Replication> results(reps);
    std::vector<double> gaps;
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        results[r] = run_replication(cfg, static_cast<int>(r), r == 0 ? &gaps : nullptr,
                                     nullptr, nullptr, 0);
    });

    SimResult out;
    out.meeting_gaps = std::move(gaps);
    out.pool_share_m = results[0].share_m;
    out.pool_share_w = results[0].share_w;
    double total_matches = 0.0;
    for (const auto& r : results) total_matches += static_cast<double>(r.matches);
    out.matches_per_unit_time = total_matches / (reps * cfg.horizon);
    out.truncation_bound = std::exp(-10.0) * phi_max(cfg.economy);

    for (int g = 0; g < 2; ++g) {
        for (int s = 0; s < 2; ++s) {
            ClassStats& cs = out.value[g][s];
            std::vector<double> means;
            long total_gens = 0, total_completions = 0;
            for (const auto& r : results) {
                const ClassAccum& a = r.cls[g][s];
                total_gens += a.births;
                total_completions += a.completions;
                if (a.births > 0) means.push_back(a.mean());
            }
            cs.generations = total_gens;
            cs.censored = total_gens > 0 && total_completions == 0;
            if (means.empty()) {
                cs.censored = true;
                continue;
            }
            double m = 0.0;
            for (double x : means) m += x;
            m /= means.size();
            cs.mean = m;
            if (means.size() >= 2) {
                double var = 0.0;
                for (double x : means) var += (x - m) * (x - m);
                var /= (means.size() - 1);
                cs.se = std::sqrt(var / means.size());
            }
        }
    }
    return out;
}

DeviationResult verify_best_response(const SimConfig& cfg, const DeviationSpec& dev) {
    cfg.validate();
    if (!(dev.type_tau >= 0.0 && dev.type_tau <= 1.0))
        throw ConfigError("verify_best_response: type must lie in [0,1]");
    const int reps = cfg.n_replications;
    const int n_dev = 512;

    Skill conformist = dev.type_tau <= cfg.profile.theta(dev.gender) ? Skill::H : Skill::L;
    Skill deviant_skill =
        dev.flip_invest ? (conformist == Skill::H ? Skill::L : Skill::H) : conformist;
    double cost = cfg.economy.cost(dev.type_tau);
    double conf_cost = conformist == Skill::H ? cost : 0.0;
    double dev_cost = deviant_skill == Skill::H ? cost : 0.0;

    std::vector<double> gain(reps);
    std::vector<double> conf_v(reps), dev_v(reps);
    parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
        ClassAccum dacc;
        Replication rep = run_replication(cfg, static_cast<int>(r), nullptr, &dev, &dacc, n_dev);
        double conformist_value = rep.cls[gi(dev.gender)][si(conformist)].mean();
        double deviant_value = dacc.mean();
        conf_v[r] = conformist_value - conf_cost;
        dev_v[r] = deviant_value - dev_cost;
        gain[r] = dev_v[r] - conf_v[r];
    });

    DeviationResult out;
    double m = 0.0, mc = 0.0, md = 0.0;
    for (int r = 0; r < reps; ++r) {
        m += gain[r];
        mc += conf_v[r];
        md += dev_v[r];
    }
    m /= reps;
    out.gain = m;
    out.conformist_net = mc / reps;
    out.deviant_net = md / reps;
    if (reps >= 2) {
        double var = 0.0;
        for (int r = 0; r < reps; ++r) var += (gain[r] - m) * (gain[r] - m);
        var /= (reps - 1);
        out.se = std::sqrt(var / reps);
    }
    return out;
}

double ks_distance_exponential(std::vector<double> samples, double rate) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double cdf = 1.0 - std::exp(-rate * samples[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::fabs(cdf - lo), std::fabs(cdf - hi)});
    }
    return d;
}

}  // namespace mel
