#include "minsurf/chart.hpp"

namespace minsurf {

ChartJet chart_jet(const Chart& c, Real u, Real v, Real h, bool prefer_exact) {
    if (prefer_exact && c.jet) return c.jet(u, v);
    if (!c.position) throw MinsurfError("chart_jet: chart has no position evaluator");

    const auto& P = c.position;
    ChartJet j;
    j.x = P(u, v);

    const Vec3 up1 = P(u + h, v), um1 = P(u - h, v), up2 = P(u + 2 * h, v), um2 = P(u - 2 * h, v);
    const Vec3 vp1 = P(u, v + h), vm1 = P(u, v - h), vp2 = P(u, v + 2 * h), vm2 = P(u, v - 2 * h);

    j.xu = (um2 - 8 * um1 + 8 * up1 - up2) / (12 * h);
    j.xv = (vm2 - 8 * vm1 + 8 * vp1 - vp2) / (12 * h);
    j.xuu = (-um2 + 16 * um1 - 30 * j.x + 16 * up1 - up2) / (12 * h * h);
    j.xvv = (-vm2 + 16 * vm1 - 30 * j.x + 16 * vp1 - vp2) / (12 * h * h);

    // cross derivative: 4th-order first-difference weights in both directions
    const Real w[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
    const Real off[4] = {-2, -1, 1, 2};
    Vec3 acc = Vec3::Zero();
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) acc += w[a] * w[b] * P(u + off[a] * h, v + off[b] * h);
    j.xuv = acc / (h * h);
    return j;
}

}  // namespace minsurf
