#include "mel/values.hpp"

#include <cmath>

namespace mel {

double value_general(const Economy& e, Skill own, double own_accept_low, double opp_high_share,
                     const AcceptancePair& opp_accept) {
    double tb = opp_high_share;
    double a = own_accept_low;
    if (std::isnan(tb) || std::isnan(a) || std::isnan(opp_accept.h) || std::isnan(opp_accept.l))
        throw ConfigError("value_general: NaN input");
    if (own == Skill::H) {
        double flow = tb * e.phi.hh + (1.0 - tb) * a * e.phi.hl;
        double rate = tb + (1.0 - tb) * a;
        return e.lambda * flow / (e.r + e.lambda * rate);
    }
    double flow = tb * opp_accept.h * e.phi.lh + (1.0 - tb) * a * opp_accept.l * e.phi.ll;
    double rate = tb * opp_accept.h + (1.0 - tb) * a * opp_accept.l;
    return e.lambda * flow / (e.r + e.lambda * rate);
}

double value_am(const Economy& e, Skill own, double opp_high_share) {
    double tb = opp_high_share;
    double flow = (own == Skill::H) ? tb * e.phi.hh + (1.0 - tb) * e.phi.hl
                                    : tb * e.phi.lh + (1.0 - tb) * e.phi.ll;
    return e.lambda * flow / (e.r + e.lambda);
}

double value_pam(const Economy& e, Skill own, double opp_high_share) {
    double tb = opp_high_share;
    if (own == Skill::H) return e.lambda * tb * e.phi.hh / (e.r + e.lambda * tb);
    return e.lambda * (1.0 - tb) * e.phi.ll / (e.r + e.lambda * (1.0 - tb));
}

}  // namespace mel
