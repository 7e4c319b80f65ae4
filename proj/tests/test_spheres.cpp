#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nrat/sphere.hpp"
#include "nrat/rng.hpp"

using namespace nrat;

namespace {

Complex C(double re, double im = 0.0) { return Complex(re, im, 128); }
CPoint P(double re, double im = 0.0) { return CPoint(C(re, im)); }

// single component, punctures at given positions, no nodes
NodedSphere<Complex> plain_sphere(const std::vector<CPoint>& pos) {
    NodedSphere<Complex> s;
    SphereComponent<Complex> c;
    c.id = 0;
    for (size_t i = 0; i < pos.size(); ++i) c.punctures.push_back({static_cast<int>(i), pos[i]});
    s.components.push_back(c);
    s.level_n = static_cast<int>(pos.size());
    return s;
}

// three components: two 3-punctured spheres joined through a middle
// component with four punctures; crushing the middle gives one bouquet of
// two level-2 punctures.  Puncture ids: comp0 {0,1,2}, comp1 {3,4,5},
// comp2 {6,7,8,9}; nodes (2,6) and (5,7).
PartialCrush<Complex> chain_crush() {
    PartialCrush<Complex> pc;
    auto& s = pc.sphere;
    for (int ci = 0; ci < 3; ++ci) {
        SphereComponent<Complex> c;
        c.id = ci;
        int base = ci == 2 ? 6 : ci * 3;
        int count = ci == 2 ? 4 : 3;
        for (int k = 0; k < count; ++k) {
            CPoint pos = k == 0   ? P(0)
                         : k == 1 ? P(1)
                         : k == 2 ? CPoint::infinity()
                                  : P(0.5, 0.5);
            c.punctures.push_back({base + k, pos});
        }
        s.components.push_back(c);
    }
    s.nodes.push_back({2, 6});
    s.nodes.push_back({5, 7});
    s.level_n = 6;
    pc.ordinary_ids = {0, 1};
    pc.retained_nodes = {};
    return pc;
}

// Two ordinary 3-punctured components joined through a crushed component
// with 2 nodal + 3 non-nodal punctures: one bouquet of level 3, n = 7.
PartialCrush<Complex> level3_crush() {
    PartialCrush<Complex> pc;
    auto& s = pc.sphere;
    for (int ci = 0; ci < 2; ++ci) {
        SphereComponent<Complex> c;
        c.id = ci;
        int base = ci * 3;
        c.punctures.push_back({base + 0, P(0)});
        c.punctures.push_back({base + 1, P(1)});
        c.punctures.push_back({base + 2, CPoint::infinity()});
        s.components.push_back(c);
    }
    SphereComponent<Complex> mid;
    mid.id = 2;
    for (int k = 0; k < 5; ++k) mid.punctures.push_back({6 + k, P(0.1 * (k + 1), 0.3)});
    s.components.push_back(mid);
    s.nodes.push_back({0, 6});  // comp0's 0-puncture to the crushed part
    s.nodes.push_back({3, 7});  // comp1's 0-puncture
    s.level_n = 7;
    pc.ordinary_ids = {0, 1};
    pc.retained_nodes = {};
    return pc;
}

}  // namespace

TEST_CASE("validate_sphere: counting identities") {
    auto ok3 = plain_sphere({P(0), P(1), CPoint::infinity()});
    CHECK(validate_sphere(ok3).ok());

    auto chain = chain_crush();
    CHECK(validate_sphere(chain.sphere).ok());  // 3+3+4 = 2*2 + 6

    // two components of size 3 with one node but claimed n=5: 6 != 2+5
    NodedSphere<Complex> bad;
    for (int ci = 0; ci < 2; ++ci) {
        SphereComponent<Complex> c;
        c.id = ci;
        c.punctures.push_back({ci * 3 + 0, P(0)});
        c.punctures.push_back({ci * 3 + 1, P(1)});
        c.punctures.push_back({ci * 3 + 2, CPoint::infinity()});
        bad.components.push_back(c);
    }
    bad.nodes.push_back({2, 3});
    bad.level_n = 5;
    CHECK(!validate_sphere(bad).ok());
    bad.level_n = 4;  // 6 = 2*1 + 4, J = M-1 = 1, J <= n-3 = 1
    CHECK(validate_sphere(bad).ok());
}

TEST_CASE("validate_sphere: structural violations") {
    // component with two punctures only
    auto s = plain_sphere({P(0), P(1)});
    s.level_n = 2;
    CHECK(!validate_sphere(s).ok());

    // coincident punctures
    auto dup = plain_sphere({P(0), P(0), CPoint::infinity()});
    CHECK(!validate_sphere(dup).ok());

    // disconnected: two components, no nodes
    NodedSphere<Complex> disc;
    for (int ci = 0; ci < 2; ++ci) {
        SphereComponent<Complex> c;
        c.id = ci;
        c.punctures.push_back({ci * 3 + 0, P(0)});
        c.punctures.push_back({ci * 3 + 1, P(1)});
        c.punctures.push_back({ci * 3 + 2, CPoint::infinity()});
        disc.components.push_back(c);
    }
    disc.level_n = 6;
    CHECK(!validate_sphere(disc).ok());

    // node joining punctures of the same component
    auto loop = plain_sphere({P(0), P(1), P(2), CPoint::infinity()});
    loop.nodes.push_back({0, 1});
    loop.level_n = 2;
    CHECK(!validate_sphere(loop).ok());
}

TEST_CASE("validate_crush: the two additional conditions") {
    // no crushed components: trivially a crush
    PartialCrush<Complex> triv;
    triv.sphere = plain_sphere({P(0), P(1), CPoint::infinity()});
    triv.ordinary_ids = {0};
    CHECK(validate_crush(triv).ok());

    auto chain = chain_crush();
    CHECK(validate_crush(chain).ok());

    // crushed component with only 1 non-nodal puncture
    auto bad = chain_crush();
    bad.sphere.components[2].punctures.pop_back();  // mid now 2 nodal + 1 free
    bad.sphere.level_n = 5;
    CHECK(!validate_crush(bad).ok());

    // a node between two ordinary components must be retained
    PartialCrush<Complex> pc;
    pc.sphere = chain_crush().sphere;
    pc.ordinary_ids = {0, 1, 2};
    pc.retained_nodes = {0};
    CHECK(!validate_crush(pc).ok());
    pc.retained_nodes = {0, 1};
    CHECK(validate_crush(pc).ok());
}

TEST_CASE("crush_data: bouquets, levels and the A + sum(L) = n identity") {
    auto chain = chain_crush();
    auto cd = crush_data(chain);
    REQUIRE(cd.bouquets.size() == 1);
    CHECK(cd.bouquets[0].level == 2);
    CHECK(cd.bouquets[0].punctures == std::vector<int>{2, 5});
    CHECK(cd.nonsingular.size() == 4);

    PartialCrush<Complex> triv;
    triv.sphere = plain_sphere({P(0), P(1), CPoint::infinity()});
    triv.ordinary_ids = {0};
    auto cdt = crush_data(triv);
    CHECK(cdt.bouquets.empty());
    CHECK(cdt.nonsingular.size() == 3);

    auto lv3 = level3_crush();
    REQUIRE(validate_crush(lv3).ok());
    auto cd3 = crush_data(lv3);
    REQUIRE(cd3.bouquets.size() == 1);
    CHECK(cd3.bouquets[0].level == 3);
    CHECK(cd3.nonsingular.size() == 4);  // A + 3 = 7
}

TEST_CASE("reduced_realization: connectivity bookkeeping") {
    PartialCrush<Complex> triv;
    triv.sphere = plain_sphere({P(0), P(1), CPoint::infinity()});
    triv.ordinary_ids = {0};
    auto g = reduced_realization(triv);
    CHECK(g.component_ids.size() == 1);
    CHECK(g.reduced_connected);
    CHECK(g.star_component_count == 1);

    // level-3 shape: plain realization disconnected, reduced connected
    auto lv3 = level3_crush();
    auto g3 = reduced_realization(lv3);
    CHECK(g3.star_component_count == 2);
    CHECK(g3.reduced_connected);

    // chain of three ordinary components joined by retained nodes
    PartialCrush<Complex> pc;
    pc.sphere = chain_crush().sphere;
    pc.ordinary_ids = {0, 1, 2};
    pc.retained_nodes = {0, 1};
    auto gc = reduced_realization(pc);
    CHECK(gc.star_component_count == 1);
    CHECK(gc.reduced_connected);
    CHECK(gc.singular_attachments.empty());
}

namespace {

MarkedCrush<Complex> marked_chain() {
    MarkedCrush<Complex> mc;
    mc.crush = chain_crush();
    // X enumeration: comp0 punctures 0,1 then comp1 punctures 3,4 then the
    // bouquet {2,5} with level 2
    mc.marking.parts = {{1}, {2}, {3}, {4}, {5, 6}};
    return mc;
}

}  // namespace

TEST_CASE("marking validation") {
    auto mc = marked_chain();
    CHECK(validate_marking(mc).ok());

    auto bad = mc;
    bad.marking.parts[4] = {5};  // bouquet part must carry level-many labels
    CHECK(!validate_marking(bad).ok());

    bad = mc;
    bad.marking.parts[0] = {2};  // label used twice, label 1 missing
    CHECK(!validate_marking(bad).ok());
}

TEST_CASE("canonical_form is idempotent and Mobius-invariant") {
    auto mc = marked_chain();
    auto c1 = canonical_form(mc);
    auto c2 = canonical_form(c1.object);
    CHECK(canonical_equal(c1.object, c2.object, 1e-30));
    CHECK(canonical_equal(mc, mc, 1e-30));

    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        auto moved = mc;
        for (auto& comp : moved.crush.sphere.components) {
            Mobius<Complex> t{rng.complex_box(2, 128), rng.complex_box(2, 128),
                              rng.complex_box(2, 128), rng.complex_box(2, 128)};
            if (FieldOps<Complex>::mag(t.det()) < 0.05) continue;
            bool collision = false;
            std::vector<CPoint> np;
            for (auto& p : comp.punctures) {
                auto q = t.apply(p.pos);
                for (auto& r : np)
                    if (sphere_dist_est(q, r) < 1e-9) collision = true;
                np.push_back(q);
            }
            if (collision) continue;
            for (size_t i = 0; i < comp.punctures.size(); ++i) comp.punctures[i].pos = np[i];
        }
        CHECK(canonical_equal(mc, moved, 1e-25));
    }

    // swapping two labels on a 3-punctured component is absorbed by a
    // Mobius map, so the object is unchanged
    auto remarked = mc;
    std::swap(remarked.marking.parts[0], remarked.marking.parts[1]);
    CHECK(canonical_equal(mc, remarked, 1e-25));

    // moving a label across components is not
    auto cross = mc;
    std::swap(cross.marking.parts[0], cross.marking.parts[2]);
    CHECK(!canonical_equal(mc, cross, 1e-25));
}

TEST_CASE("marking swaps on a 4-punctured component change the class") {
    MarkedCrush<Complex> mc;
    mc.crush.sphere.components.push_back({0,
                                          {{0, CPoint(Complex(2, 0, 128))},
                                           {1, CPoint(Complex(5, 0, 128))},
                                           {2, CPoint::infinity()},
                                           {3, CPoint(Complex(0, 1, 128))}}});
    mc.crush.sphere.level_n = 4;
    mc.crush.ordinary_ids = {0};
    mc.marking.parts = {{1}, {2}, {3}, {4}};
    auto other = mc;
    std::swap(other.marking.parts[0], other.marking.parts[1]);  // cross-ratio moves
    CHECK(!canonical_equal(mc, other, 1e-25));
}

TEST_CASE("canonical_form moves anchor punctures to 0, 1, infinity") {
    MarkedCrush<Complex> mc;
    mc.crush.sphere = plain_sphere({P(2), P(5), CPoint::infinity(), P(0, 1)});
    mc.crush.ordinary_ids = {0};
    mc.marking.parts = {{1}, {2}, {3}, {4}};
    auto cf = canonical_form(mc);
    const auto& ps = cf.object.crush.sphere.components[0].punctures;
    REQUIRE(ps.size() == 4);
    CHECK(!ps[0].pos.is_inf());
    CHECK(ps[0].pos.value().is_zero());
    CHECK(FieldOps<Complex>::mag(ps[1].pos.value() - C(1)) == 0.0);
    CHECK(ps[2].pos.is_inf());
    // the fourth puncture lands at the cross-ratio image of (0,1) w.r.t (2,5,inf)
    Complex expect = (C(0, 1) - C(2)) / (C(5) - C(2));
    CHECK(FieldOps<Complex>::mag(ps[3].pos.value() - expect) < 1e-30);
}
