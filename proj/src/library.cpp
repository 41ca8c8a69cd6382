#include "dnls/library.hpp"

namespace dnls {

namespace {
Monomial mono(int j, Factor f1, Factor f2, Factor f3, cplx c) {
    return Monomial{j, {f1, f2, f3}, c};
}
}  // namespace

CubicSystem single_nls(cplx lambda, double m) {
    CubicSystem sys(1, MassVector{{m}},
                    {mono(1, {1, 0}, {1, 0}, {2, 0}, lambda)});
    sys.canonicalize();
    return sys;
}

CubicSystem dnls_single(double m) {
    const cplx mi{0.0, -1.0};
    CubicSystem sys(1, MassVector{{m}},
                    {mono(1, {1, 0}, {1, 0}, {2, 0}, mi),
                     mono(1, {1, 1}, {2, 1}, {1, 0}, mi)});
    sys.canonicalize();
    return sys;
}

CubicSystem two_component(double m1, double m2, cplx lambda1, cplx lambda2,
                          cplx nu1, cplx nu2) {
    CubicSystem sys(2, MassVector{{m1, m2}},
                    {mono(1, {1, 0}, {1, 0}, {3, 0}, lambda1),
                     mono(1, {3, 0}, {3, 0}, {2, 0}, nu1),
                     mono(2, {2, 0}, {2, 0}, {4, 0}, lambda2),
                     mono(2, {1, 0}, {1, 0}, {1, 0}, nu2)});
    sys.canonicalize();
    return sys;
}

CubicSystem coupled_derivative(double m, cplx lambda1, cplx lambda2,
                               cplx lambda3) {
    const cplx i{0.0, 1.0};
    CubicSystem sys(
        2, MassVector{{m, 3.0 * m}},
        {
            mono(1, {1, 0}, {1, 0}, {3, 0}, lambda1),
            mono(1, {3, 0}, {1, 1}, {1, 1}, lambda2),
            // i u2 d/dx(conj(u1)^2) = 2i u2 conj(u1) conj(u1)_x
            mono(1, {2, 0}, {3, 0}, {3, 1}, 2.0 * i),
            mono(2, {2, 0}, {4, 0}, {2, 1}, lambda3),
            mono(2, {2, 0}, {4, 0}, {2, 0}, -i),
            mono(2, {2, 1}, {4, 1}, {2, 0}, -i),
            // -i d/dx(u1^3) = -3i u1^2 u1_x
            mono(2, {1, 0}, {1, 0}, {1, 1}, -3.0 * i),
        });
    sys.canonicalize();
    return sys;
}

CubicSystem null_structure_three(double m) {
    CubicSystem sys(
        3, MassVector{{m, m, 3.0 * m}},
        {
            // u2 d/dx(conj(u1) u2)
            mono(1, {2, 0}, {4, 1}, {2, 0}, 1.0),
            mono(1, {2, 0}, {4, 0}, {2, 1}, 1.0),
            mono(2, {4, 0}, {5, 0}, {3, 1}, 1.0),
            mono(2, {4, 0}, {3, 0}, {5, 1}, 3.0),
            // 2 u1^2 u2_x - u2 d/dx(u1^2)
            mono(3, {1, 0}, {1, 0}, {2, 1}, 2.0),
            mono(3, {2, 0}, {1, 0}, {1, 1}, -2.0),
        });
    sys.canonicalize();
    return sys;
}

}  // namespace dnls
