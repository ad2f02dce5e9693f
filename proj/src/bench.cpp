#include "lfir/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "lfir/image.hpp"
#include "lfir/interp.hpp"
#include "lfir/parser.hpp"

namespace lf::bench {
namespace {

std::string arr_type(const std::vector<int64_t>& dims) {
    std::string s = "float";
    for (auto it = dims.rbegin(); it != dims.rend(); ++it)
        s = "[" + std::to_string(*it) + " x " + s + "]";
    return s;
}

// Role-parameter prologue: unpack %params/%temps/%retval cells into typed
// buffer pointers %a<k>, %t<k>, %r0.
void emit_prelude(std::ostringstream& os, const std::vector<std::string>& params,
                  const std::vector<std::string>& temps, const std::string& ret) {
    os << "define void @main(i8** %params, i8** %temps, i8** %retval) {\n";
    os << "entry:\n";
    for (size_t k = 0; k < params.size(); k++) {
        std::string cell = "%params";
        if (k) {
            os << "  %ps" << k << " = getelementptr i8** %params, i64 " << k
           << "\n";
            cell = "%ps" + std::to_string(k);
        }
        os << "  %pc" << k << " = bitcast i8** " << cell << " to " << params[k]
           << "**\n";
        os << "  %a" << k << " = load " << params[k] << "** %pc" << k
           << ", align 8\n";
    }
    for (size_t k = 0; k < temps.size(); k++) {
        std::string cell = "%temps";
        if (k) {
            os << "  %ts" << k << " = getelementptr i8** %temps, i64 " << k
           << "\n";
            cell = "%ts" + std::to_string(k);
        }
        os << "  %tc" << k << " = bitcast i8** " << cell << " to " << temps[k]
           << "**\n";
        os << "  %t" << k << " = load " << temps[k] << "** %tc" << k
           << ", align 8\n";
    }
    os << "  %rc = bitcast i8** %retval to " << ret << "**\n";
    os << "  %r0 = load " << ret << "** %rc, align 8\n";
}

std::string emit_vecmul(int64_t n, bool unrolled) {
    std::string vty = arr_type({n});
    std::ostringstream os;
    emit_prelude(os, {vty, vty}, {}, vty);
    if (unrolled) {
        for (int64_t i = 0; i < n; i++) {
            os << "  %pa" << i << " = getelementptr inbounds " << vty
               << "* %a0, i64 0, i64 " << i << "\n";
            os << "  %va" << i << " = load float* %pa" << i << ", align 4\n";
            os << "  %pb" << i << " = getelementptr inbounds " << vty
               << "* %a1, i64 0, i64 " << i << "\n";
            os << "  %vb" << i << " = load float* %pb" << i << ", align 4\n";
            os << "  %vm" << i << " = fmul float %va" << i << ", %vb" << i
               << "\n";
            os << "  %pr" << i << " = getelementptr inbounds " << vty
               << "* %r0, i64 0, i64 " << i << "\n";
            os << "  store float %vm" << i << ", float* %pr" << i
               << ", align 4\n";
        }
        os << "  ret void\n}\n";
        return os.str();
    }
    os << "  br label %loop\n";
    os << "loop:\n";
    os << "  %i = phi i64 [ 0, %entry ], [ %in, %loop ]\n";
    os << "  %pa = getelementptr inbounds " << vty << "* %a0, i64 0, i64 %i\n";
    os << "  %va = load float* %pa, align 4\n";
    os << "  %pb = getelementptr inbounds " << vty << "* %a1, i64 0, i64 %i\n";
    os << "  %vb = load float* %pb, align 4\n";
    os << "  %vm = fmul float %va, %vb\n";
    os << "  %pr = getelementptr inbounds " << vty << "* %r0, i64 0, i64 %i\n";
    os << "  store float %vm, float* %pr, align 4\n";
    os << "  %in = add i64 %i, 1\n";
    os << "  %done = icmp eq i64 %in, " << n << "\n";
    os << "  br i1 %done, label %exit, label %loop\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

std::string emit_dense(int64_t n) {
    std::string vty = arr_type({n});
    std::string wty = arr_type({n, n});
    std::ostringstream os;
    emit_prelude(os, {vty, wty, vty}, {}, vty);
    os << "  br label %o_head\n";
    os << "o_head:\n";
    os << "  %o = phi i64 [ 0, %entry ], [ %on, %o_latch ]\n";
    os << "  br label %i_body\n";
    os << "i_body:\n";
    os << "  %i = phi i64 [ 0, %o_head ], [ %in, %i_body ]\n";
    os << "  %acc = phi float [ 0.0, %o_head ], [ %acc2, %i_body ]\n";
    os << "  %pw = getelementptr inbounds " << wty
       << "* %a1, i64 0, i64 %i, i64 %o\n";
    os << "  %w = load float* %pw, align 4\n";
    os << "  %px = getelementptr inbounds " << vty << "* %a0, i64 0, i64 %i\n";
    os << "  %x = load float* %px, align 4\n";
    os << "  %m = fmul float %w, %x\n";
    os << "  %acc2 = fadd float %acc, %m\n";
    os << "  %in = add i64 %i, 1\n";
    os << "  %idone = icmp eq i64 %in, " << n << "\n";
    os << "  br i1 %idone, label %o_latch, label %i_body\n";
    os << "o_latch:\n";
    os << "  %pb = getelementptr inbounds " << vty << "* %a2, i64 0, i64 %o\n";
    os << "  %bv = load float* %pb, align 4\n";
    os << "  %z = fadd float %acc2, %bv\n";
    os << "  %neg = fcmp olt float %z, 0.0\n";
    os << "  %act = select i1 %neg, float 0.0, float %z\n";
    os << "  %pr = getelementptr inbounds " << vty << "* %r0, i64 0, i64 %o\n";
    os << "  store float %act, float* %pr, align 4\n";
    os << "  %on = add i64 %o, 1\n";
    os << "  %odone = icmp eq i64 %on, " << n << "\n";
    os << "  br i1 %odone, label %exit, label %o_head\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

std::string emit_softmax(int64_t n, bool unrolled) {
    std::string vty = arr_type({n});
    std::ostringstream os;
    os << "declare float @expf(float)\n";
    os << "declare float @maxnum.f32(float, float)\n\n";
    if (unrolled) {
        // Register-only: exponentials never touch memory.
        emit_prelude(os, {vty}, {}, vty);
        for (int64_t i = 0; i < n; i++) {
            os << "  %px" << i << " = getelementptr inbounds " << vty
               << "* %a0, i64 0, i64 " << i << "\n";
            os << "  %x" << i << " = load float* %px" << i << ", align 4\n";
        }
        std::string m = "%x0";
        for (int64_t i = 1; i < n; i++) {
            os << "  %m" << i << " = call float @maxnum.f32(float " << m
               << ", float %x" << i << ")\n";
            m = "%m" + std::to_string(i);
        }
        std::string s = "0.0";
        for (int64_t i = 0; i < n; i++) {
            os << "  %d" << i << " = fsub float %x" << i << ", " << m << "\n";
            os << "  %e" << i << " = call float @expf(float %d" << i << ")\n";
            os << "  %s" << i << " = fadd float " << s << ", %e" << i << "\n";
            s = "%s" + std::to_string(i);
        }
        for (int64_t i = 0; i < n; i++) {
            os << "  %q" << i << " = fdiv float %e" << i << ", " << s << "\n";
            os << "  %pr" << i << " = getelementptr inbounds " << vty
               << "* %r0, i64 0, i64 " << i << "\n";
            os << "  store float %q" << i << ", float* %pr" << i
               << ", align 4\n";
        }
        os << "  ret void\n}\n";
        return os.str();
    }
    emit_prelude(os, {vty}, {vty}, vty);
    os << "  %px0 = getelementptr inbounds " << vty << "* %a0, i64 0, i64 0\n";
    os << "  %x0 = load float* %px0, align 4\n";
    os << "  br label %max_loop\n";
    os << "max_loop:\n";
    os << "  %i = phi i64 [ 1, %entry ], [ %in, %max_loop ]\n";
    os << "  %m = phi float [ %x0, %entry ], [ %m2, %max_loop ]\n";
    os << "  %px = getelementptr inbounds " << vty << "* %a0, i64 0, i64 %i\n";
    os << "  %x = load float* %px, align 4\n";
    os << "  %m2 = call float @maxnum.f32(float %m, float %x)\n";
    os << "  %in = add i64 %i, 1\n";
    os << "  %mdone = icmp eq i64 %in, " << n << "\n";
    os << "  br i1 %mdone, label %exp_loop, label %max_loop\n";
    os << "exp_loop:\n";
    os << "  %j = phi i64 [ 0, %max_loop ], [ %jn, %exp_loop ]\n";
    os << "  %s = phi float [ 0.0, %max_loop ], [ %s2, %exp_loop ]\n";
    os << "  %pxj = getelementptr inbounds " << vty << "* %a0, i64 0, i64 %j\n";
    os << "  %xj = load float* %pxj, align 4\n";
    os << "  %sub = fsub float %xj, %m2\n";
    os << "  %e = call float @expf(float %sub)\n";
    os << "  %pt = getelementptr inbounds " << vty << "* %t0, i64 0, i64 %j\n";
    os << "  store float %e, float* %pt, align 4\n";
    os << "  %s2 = fadd float %s, %e\n";
    os << "  %jn = add i64 %j, 1\n";
    os << "  %edone = icmp eq i64 %jn, " << n << "\n";
    os << "  br i1 %edone, label %div_loop, label %exp_loop\n";
    os << "div_loop:\n";
    os << "  %k = phi i64 [ 0, %exp_loop ], [ %kn, %div_loop ]\n";
    os << "  %pe = getelementptr inbounds " << vty << "* %t0, i64 0, i64 %k\n";
    os << "  %ev = load float* %pe, align 4\n";
    os << "  %q = fdiv float %ev, %s2\n";
    os << "  %pq = getelementptr inbounds " << vty << "* %r0, i64 0, i64 %k\n";
    os << "  store float %q, float* %pq, align 4\n";
    os << "  %kn = add i64 %k, 1\n";
    os << "  %ddone = icmp eq i64 %kn, " << n << "\n";
    os << "  br i1 %ddone, label %exit, label %div_loop\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

std::string emit_conv2d(int64_t h, int64_t w, int64_t ch, bool unrolled) {
    std::string ity = arr_type({h, w});
    std::string fty = arr_type({ch, 3, 3});
    std::string oty = arr_type({ch, h, w});
    std::ostringstream os;
    emit_prelude(os, {ity, fty}, {}, oty);
    if (unrolled) {
        // Hoist the filter taps, then skip out-of-bounds taps outright.
        for (int64_t c = 0; c < ch; c++)
            for (int64_t dy = 0; dy < 3; dy++)
                for (int64_t dx = 0; dx < 3; dx++) {
                    std::string id = std::to_string(c) + "_" +
                                     std::to_string(dy) + "_" +
                                     std::to_string(dx);
                    os << "  %fp" << id << " = getelementptr inbounds " << fty
                       << "* %a1, i64 0, i64 " << c << ", i64 " << dy
                       << ", i64 " << dx << "\n";
                    os << "  %f" << id << " = load float* %fp" << id
                       << ", align 4\n";
                }
        int64_t t = 0;
        for (int64_t c = 0; c < ch; c++)
            for (int64_t y = 0; y < h; y++)
                for (int64_t x = 0; x < w; x++) {
                    std::string acc;
                    for (int64_t dy = 0; dy < 3; dy++)
                        for (int64_t dx = 0; dx < 3; dx++) {
                            int64_t iy = y + dy - 1, ix = x + dx - 1;
                            if (iy < 0 || iy >= h || ix < 0 || ix >= w)
                                continue;
                            std::string id = std::to_string(c) + "_" +
                                             std::to_string(dy) + "_" +
                                             std::to_string(dx);
                            os << "  %vp" << t << " = getelementptr inbounds "
                               << ity << "* %a0, i64 0, i64 " << iy << ", i64 "
                               << ix << "\n";
                            os << "  %v" << t << " = load float* %vp" << t
                               << ", align 4\n";
                            os << "  %u" << t << " = fmul float %v" << t
                               << ", %f" << id << "\n";
                            if (acc.empty()) {
                                acc = "%u" + std::to_string(t);
                            } else {
                                os << "  %w" << t << " = fadd float " << acc
                                   << ", %u" << t << "\n";
                                acc = "%w" + std::to_string(t);
                            }
                            t++;
                        }
                    os << "  %op" << t << " = getelementptr inbounds " << oty
                       << "* %r0, i64 0, i64 " << c << ", i64 " << y
                       << ", i64 " << x << "\n";
                    os << "  store float " << acc << ", float* %op" << t
                       << ", align 4\n";
                    t++;
                }
        os << "  ret void\n}\n";
        return os.str();
    }
    os << "  br label %c_head\n";
    os << "c_head:\n";
    os << "  %c = phi i64 [ 0, %entry ], [ %cn, %c_latch ]\n";
    os << "  br label %y_head\n";
    os << "y_head:\n";
    os << "  %y = phi i64 [ 0, %c_head ], [ %yn, %y_latch ]\n";
    os << "  br label %x_head\n";
    os << "x_head:\n";
    os << "  %x = phi i64 [ 0, %y_head ], [ %xn, %x_latch ]\n";
    os << "  br label %dy_head\n";
    os << "dy_head:\n";
    os << "  %dy = phi i64 [ 0, %x_head ], [ %dyn, %dy_latch ]\n";
    os << "  %acy = phi float [ 0.0, %x_head ], [ %acx2, %dy_latch ]\n";
    os << "  br label %dx_body\n";
    os << "dx_body:\n";
    os << "  %dx = phi i64 [ 0, %dy_head ], [ %dxn, %dx_body ]\n";
    os << "  %acx = phi float [ %acy, %dy_head ], [ %acx2, %dx_body ]\n";
    os << "  %iy0 = add i64 %y, %dy\n";
    os << "  %iy = sub i64 %iy0, 1\n";
    os << "  %ix0 = add i64 %x, %dx\n";
    os << "  %ix = sub i64 %ix0, 1\n";
    os << "  %oky1 = icmp sge i64 %iy, 0\n";
    os << "  %oky2 = icmp slt i64 %iy, " << h << "\n";
    os << "  %okx1 = icmp sge i64 %ix, 0\n";
    os << "  %okx2 = icmp slt i64 %ix, " << w << "\n";
    os << "  %oky = select i1 %oky1, i1 %oky2, i1 false\n";
    os << "  %okx = select i1 %okx1, i1 %okx2, i1 false\n";
    os << "  %ok = select i1 %oky, i1 %okx, i1 false\n";
    // Clamp the indices so the load stays in bounds, then mask the value.
    os << "  %cy1 = select i1 %oky1, i64 %iy, i64 0\n";
    os << "  %cy = select i1 %oky2, i64 %cy1, i64 0\n";
    os << "  %cx1 = select i1 %okx1, i64 %ix, i64 0\n";
    os << "  %cx = select i1 %okx2, i64 %cx1, i64 0\n";
    os << "  %pv = getelementptr inbounds " << ity
       << "* %a0, i64 0, i64 %cy, i64 %cx\n";
    os << "  %v0 = load float* %pv, align 4\n";
    os << "  %v = select i1 %ok, float %v0, float 0.0\n";
    os << "  %pf = getelementptr inbounds " << fty
       << "* %a1, i64 0, i64 %c, i64 %dy, i64 %dx\n";
    os << "  %f = load float* %pf, align 4\n";
    os << "  %mul = fmul float %v, %f\n";
    os << "  %acx2 = fadd float %acx, %mul\n";
    os << "  %dxn = add i64 %dx, 1\n";
    os << "  %ddx = icmp eq i64 %dxn, 3\n";
    os << "  br i1 %ddx, label %dy_latch, label %dx_body\n";
    os << "dy_latch:\n";
    os << "  %dyn = add i64 %dy, 1\n";
    os << "  %ddy = icmp eq i64 %dyn, 3\n";
    os << "  br i1 %ddy, label %x_latch, label %dy_head\n";
    os << "x_latch:\n";
    os << "  %po = getelementptr inbounds " << oty
       << "* %r0, i64 0, i64 %c, i64 %y, i64 %x\n";
    os << "  store float %acx2, float* %po, align 4\n";
    os << "  %xn = add i64 %x, 1\n";
    os << "  %xdone = icmp eq i64 %xn, " << w << "\n";
    os << "  br i1 %xdone, label %y_latch, label %x_head\n";
    os << "y_latch:\n";
    os << "  %yn = add i64 %y, 1\n";
    os << "  %ydone = icmp eq i64 %yn, " << h << "\n";
    os << "  br i1 %ydone, label %c_latch, label %y_head\n";
    os << "c_latch:\n";
    os << "  %cn = add i64 %c, 1\n";
    os << "  %cdone = icmp eq i64 %cn, " << ch << "\n";
    os << "  br i1 %cdone, label %exit, label %c_head\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

std::string emit_maxp(int64_t h, int64_t w, bool unrolled) {
    std::string ity = arr_type({h, w});
    std::string oty = arr_type({h / 2, w / 2});
    std::ostringstream os;
    os << "declare float @maxnum.f32(float, float)\n\n";
    emit_prelude(os, {ity}, {}, oty);
    if (unrolled) {
        int64_t t = 0;
        for (int64_t y = 0; y < h / 2; y++)
            for (int64_t x = 0; x < w / 2; x++) {
                auto tap = [&](int64_t dy, int64_t dx, int64_t id) {
                    os << "  %p" << t << "_" << id
                       << " = getelementptr inbounds " << ity
                       << "* %a0, i64 0, i64 " << (2 * y + dy) << ", i64 "
                       << (2 * x + dx) << "\n";
                    os << "  %v" << t << "_" << id << " = load float* %p" << t
                       << "_" << id << ", align 4\n";
                };
                tap(0, 0, 0);
                tap(0, 1, 1);
                tap(1, 0, 2);
                tap(1, 1, 3);
                os << "  %m" << t << "_0 = call float @maxnum.f32(float %v"
                   << t << "_0, float %v" << t << "_1)\n";
                os << "  %m" << t << "_1 = call float @maxnum.f32(float %v"
                   << t << "_2, float %v" << t << "_3)\n";
                os << "  %m" << t << "_2 = call float @maxnum.f32(float %m"
                   << t << "_0, float %m" << t << "_1)\n";
                os << "  %op" << t << " = getelementptr inbounds " << oty
                   << "* %r0, i64 0, i64 " << y << ", i64 " << x << "\n";
                os << "  store float %m" << t << "_2, float* %op" << t
                   << ", align 4\n";
                t++;
            }
        os << "  ret void\n}\n";
        return os.str();
    }
    os << "  br label %y_head\n";
    os << "y_head:\n";
    os << "  %y = phi i64 [ 0, %entry ], [ %yn, %y_latch ]\n";
    os << "  br label %x_body\n";
    os << "x_body:\n";
    os << "  %x = phi i64 [ 0, %y_head ], [ %xn, %x_body ]\n";
    os << "  %y2 = mul i64 %y, 2\n";
    os << "  %x2 = mul i64 %x, 2\n";
    os << "  %y21 = add i64 %y2, 1\n";
    os << "  %x21 = add i64 %x2, 1\n";
    os << "  %p00 = getelementptr inbounds " << ity
       << "* %a0, i64 0, i64 %y2, i64 %x2\n";
    os << "  %v00 = load float* %p00, align 4\n";
    os << "  %p01 = getelementptr inbounds " << ity
       << "* %a0, i64 0, i64 %y2, i64 %x21\n";
    os << "  %v01 = load float* %p01, align 4\n";
    os << "  %p10 = getelementptr inbounds " << ity
       << "* %a0, i64 0, i64 %y21, i64 %x2\n";
    os << "  %v10 = load float* %p10, align 4\n";
    os << "  %p11 = getelementptr inbounds " << ity
       << "* %a0, i64 0, i64 %y21, i64 %x21\n";
    os << "  %v11 = load float* %p11, align 4\n";
    os << "  %m0 = call float @maxnum.f32(float %v00, float %v01)\n";
    os << "  %m1 = call float @maxnum.f32(float %v10, float %v11)\n";
    os << "  %m2 = call float @maxnum.f32(float %m0, float %m1)\n";
    os << "  %po = getelementptr inbounds " << oty
       << "* %r0, i64 0, i64 %y, i64 %x\n";
    os << "  store float %m2, float* %po, align 4\n";
    os << "  %xn = add i64 %x, 1\n";
    os << "  %xdone = icmp eq i64 %xn, " << (w / 2) << "\n";
    os << "  br i1 %xdone, label %y_latch, label %x_body\n";
    os << "y_latch:\n";
    os << "  %yn = add i64 %y, 1\n";
    os << "  %ydone = icmp eq i64 %yn, " << (h / 2) << "\n";
    os << "  br i1 %ydone, label %exit, label %y_head\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

std::string emit_thxprlsg(int64_t n) {
    std::string vty = arr_type({n});
    std::ostringstream os;
    os << "declare float @tanhf(float)\n";
    os << "declare float @expf(float)\n\n";
    emit_prelude(os, {vty}, {}, vty);
    os << "  br label %loop\n";
    os << "loop:\n";
    os << "  %i = phi i64 [ 0, %entry ], [ %in, %loop ]\n";
    os << "  %px = getelementptr inbounds " << vty << "* %a0, i64 0, i64 %i\n";
    os << "  %x = load float* %px, align 4\n";
    os << "  %th = call float @tanhf(float %x)\n";
    os << "  %ex = call float @expf(float %th)\n";
    os << "  %neg = fcmp olt float %ex, 0.0\n";
    os << "  %rl = select i1 %neg, float 0.0, float %ex\n";
    os << "  %nr = fsub float 0.0, %rl\n";
    os << "  %en = call float @expf(float %nr)\n";
    os << "  %dn = fadd float 1.0, %en\n";
    os << "  %sg = fdiv float 1.0, %dn\n";
    os << "  %pr = getelementptr inbounds " << vty << "* %r0, i64 0, i64 %i\n";
    os << "  store float %sg, float* %pr, align 4\n";
    os << "  %in = add i64 %i, 1\n";
    os << "  %done = icmp eq i64 %in, " << n << "\n";
    os << "  br i1 %done, label %exit, label %loop\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

std::string emit_mnist() {
    const int64_t kIn = 784, kOut = 10;
    std::string xty = arr_type({kIn});
    std::string wty = arr_type({kIn, kOut});
    std::string vty = arr_type({kOut});
    std::ostringstream os;
    os << "declare float @expf(float)\n";
    os << "declare float @maxnum.f32(float, float)\n\n";
    emit_prelude(os, {xty, wty, vty}, {vty, vty}, vty);
    // Dense layer into the logits scratch buffer.
    os << "  br label %o_head\n";
    os << "o_head:\n";
    os << "  %o = phi i64 [ 0, %entry ], [ %on, %o_latch ]\n";
    os << "  br label %i_body\n";
    os << "i_body:\n";
    os << "  %i = phi i64 [ 0, %o_head ], [ %in, %i_body ]\n";
    os << "  %acc = phi float [ 0.0, %o_head ], [ %acc2, %i_body ]\n";
    os << "  %pw = getelementptr inbounds " << wty
       << "* %a1, i64 0, i64 %i, i64 %o\n";
    os << "  %w = load float* %pw, align 4\n";
    os << "  %px = getelementptr inbounds " << xty << "* %a0, i64 0, i64 %i\n";
    os << "  %x = load float* %px, align 4\n";
    os << "  %m = fmul float %w, %x\n";
    os << "  %acc2 = fadd float %acc, %m\n";
    os << "  %in = add i64 %i, 1\n";
    os << "  %idone = icmp eq i64 %in, " << kIn << "\n";
    os << "  br i1 %idone, label %o_latch, label %i_body\n";
    os << "o_latch:\n";
    os << "  %pb = getelementptr inbounds " << vty << "* %a2, i64 0, i64 %o\n";
    os << "  %bv = load float* %pb, align 4\n";
    os << "  %z = fadd float %acc2, %bv\n";
    os << "  %pz = getelementptr inbounds " << vty << "* %t0, i64 0, i64 %o\n";
    os << "  store float %z, float* %pz, align 4\n";
    os << "  %on = add i64 %o, 1\n";
    os << "  %odone = icmp eq i64 %on, " << kOut << "\n";
    os << "  br i1 %odone, label %sm_pre, label %o_head\n";
    // Softmax over the logits.
    os << "sm_pre:\n";
    os << "  %pz0 = getelementptr inbounds " << vty << "* %t0, i64 0, i64 0\n";
    os << "  %z0 = load float* %pz0, align 4\n";
    os << "  br label %max_loop\n";
    os << "max_loop:\n";
    os << "  %j = phi i64 [ 1, %sm_pre ], [ %jn, %max_loop ]\n";
    os << "  %mx = phi float [ %z0, %sm_pre ], [ %mx2, %max_loop ]\n";
    os << "  %pzj = getelementptr inbounds " << vty << "* %t0, i64 0, i64 %j\n";
    os << "  %zj = load float* %pzj, align 4\n";
    os << "  %mx2 = call float @maxnum.f32(float %mx, float %zj)\n";
    os << "  %jn = add i64 %j, 1\n";
    os << "  %mdone = icmp eq i64 %jn, " << kOut << "\n";
    os << "  br i1 %mdone, label %exp_loop, label %max_loop\n";
    os << "exp_loop:\n";
    os << "  %k = phi i64 [ 0, %max_loop ], [ %kn, %exp_loop ]\n";
    os << "  %s = phi float [ 0.0, %max_loop ], [ %s2, %exp_loop ]\n";
    os << "  %pzk = getelementptr inbounds " << vty << "* %t0, i64 0, i64 %k\n";
    os << "  %zk = load float* %pzk, align 4\n";
    os << "  %sub = fsub float %zk, %mx2\n";
    os << "  %e = call float @expf(float %sub)\n";
    os << "  %pe = getelementptr inbounds " << vty << "* %t1, i64 0, i64 %k\n";
    os << "  store float %e, float* %pe, align 4\n";
    os << "  %s2 = fadd float %s, %e\n";
    os << "  %kn = add i64 %k, 1\n";
    os << "  %edone = icmp eq i64 %kn, " << kOut << "\n";
    os << "  br i1 %edone, label %div_loop, label %exp_loop\n";
    os << "div_loop:\n";
    os << "  %l = phi i64 [ 0, %exp_loop ], [ %ln, %div_loop ]\n";
    os << "  %pel = getelementptr inbounds " << vty << "* %t1, i64 0, i64 %l\n";
    os << "  %el = load float* %pel, align 4\n";
    os << "  %q = fdiv float %el, %s2\n";
    os << "  %pq = getelementptr inbounds " << vty << "* %r0, i64 0, i64 %l\n";
    os << "  store float %q, float* %pq, align 4\n";
    os << "  %ln = add i64 %l, 1\n";
    os << "  %ddone = icmp eq i64 %ln, " << kOut << "\n";
    os << "  br i1 %ddone, label %exit, label %div_loop\n";
    os << "exit:\n  ret void\n}\n";
    return os.str();
}

// ---- golden models ------------------------------------------------------

using Vec = std::vector<float>;

Vec golden_vecmul(int64_t n, const Vec& a, const Vec& b) {
    Vec out(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; i++)
        out[static_cast<size_t>(i)] =
            a[static_cast<size_t>(i)] * b[static_cast<size_t>(i)];
    return out;
}

Vec golden_dense(int64_t n, const Vec& x, const Vec& w, const Vec& b,
                 bool relu) {
    Vec out(static_cast<size_t>(n));
    for (int64_t o = 0; o < n; o++) {
        float acc = 0.0f;
        for (int64_t i = 0; i < n; i++)
            acc += w[static_cast<size_t>(i * n + o)] *
                   x[static_cast<size_t>(i)];
        acc += b[static_cast<size_t>(o)];
        out[static_cast<size_t>(o)] = (relu && acc < 0.0f) ? 0.0f : acc;
    }
    return out;
}

Vec golden_softmax(const Vec& x) {
    size_t n = x.size();
    float m = x[0];
    for (size_t i = 1; i < n; i++) m = std::fmax(m, x[i]);
    Vec e(n);
    float s = 0.0f;
    for (size_t i = 0; i < n; i++) {
        e[i] = std::exp(x[i] - m);
        s += e[i];
    }
    Vec out(n);
    for (size_t i = 0; i < n; i++) out[i] = e[i] / s;
    return out;
}

Vec golden_conv2d(int64_t h, int64_t w, int64_t ch, const Vec& in,
                  const Vec& filt) {
    Vec out(static_cast<size_t>(ch * h * w));
    for (int64_t c = 0; c < ch; c++)
        for (int64_t y = 0; y < h; y++)
            for (int64_t x = 0; x < w; x++) {
                float acc = 0.0f;
                for (int64_t dy = 0; dy < 3; dy++)
                    for (int64_t dx = 0; dx < 3; dx++) {
                        int64_t iy = y + dy - 1, ix = x + dx - 1;
                        float v = (iy >= 0 && iy < h && ix >= 0 && ix < w)
                                      ? in[static_cast<size_t>(iy * w + ix)]
                                      : 0.0f;
                        acc += v * filt[static_cast<size_t>((c * 3 + dy) * 3 +
                                                            dx)];
                    }
                out[static_cast<size_t>((c * h + y) * w + x)] = acc;
            }
    return out;
}

Vec golden_maxp(int64_t h, int64_t w, const Vec& in) {
    Vec out(static_cast<size_t>((h / 2) * (w / 2)));
    for (int64_t y = 0; y < h / 2; y++)
        for (int64_t x = 0; x < w / 2; x++) {
            auto at = [&](int64_t dy, int64_t dx) {
                return in[static_cast<size_t>((2 * y + dy) * w + 2 * x + dx)];
            };
            float m0 = std::fmax(at(0, 0), at(0, 1));
            float m1 = std::fmax(at(1, 0), at(1, 1));
            out[static_cast<size_t>(y * (w / 2) + x)] = std::fmax(m0, m1);
        }
    return out;
}

Vec golden_thxprlsg(const Vec& x) {
    Vec out(x.size());
    for (size_t i = 0; i < x.size(); i++) {
        float t = std::tanh(x[i]);
        float e = std::exp(t);
        float r = (e < 0.0f) ? 0.0f : e;
        out[i] = 1.0f / (1.0f + std::exp(-r));
    }
    return out;
}

Vec golden_mnist(const Vec& x, const Vec& w, const Vec& b) {
    const int64_t kIn = 784, kOut = 10;
    Vec z(static_cast<size_t>(kOut));
    for (int64_t o = 0; o < kOut; o++) {
        float acc = 0.0f;
        for (int64_t i = 0; i < kIn; i++)
            acc += w[static_cast<size_t>(i * kOut + o)] *
                   x[static_cast<size_t>(i)];
        z[static_cast<size_t>(o)] = acc + b[static_cast<size_t>(o)];
    }
    return golden_softmax(z);
}

uint32_t fnv1a(const std::string& s) {
    uint32_t h = 2166136261u;
    for (char c : s) {
        h ^= static_cast<uint8_t>(c);
        h *= 16777619u;
    }
    return h;
}

bool softmax_bearing(const BenchmarkCase& c) {
    return c.kind == "softmax" || c.kind == "mnist_mlp";
}

}  // namespace

const std::vector<BenchmarkCase>& registry() {
    static const std::vector<BenchmarkCase> kCases = {
        {"vecmul_a", "vecmul", {.n = 8}},
        {"vecmul_b", "vecmul", {.n = 64}},
        {"vecmul_b_u", "vecmul", {.n = 64, .unrolled = true}},
        {"dense_a", "dense", {.n = 8}},
        {"dense_b", "dense", {.n = 64}},
        {"softmax_a", "softmax", {.n = 8}},
        {"softmax_b", "softmax", {.n = 64}},
        {"softmax_b_u", "softmax", {.n = 64, .unrolled = true}},
        {"conv2d_a", "conv2d", {.h = 8, .w = 8}},
        {"conv2d_a_u", "conv2d", {.h = 8, .w = 8, .unrolled = true}},
        {"conv2d_b", "conv2d", {.h = 64, .w = 64}},
        {"maxp_a", "maxp", {.h = 8, .w = 8}},
        {"maxp_b", "maxp", {.h = 32, .w = 32}},
        {"maxp_b_u", "maxp", {.h = 32, .w = 32, .unrolled = true}},
        {"thxprlsg", "thxprlsg", {.n = 8}},
        {"mnist_mlp", "mnist_mlp", {}},
    };
    return kCases;
}

const BenchmarkCase* find_case(const std::string& name) {
    for (const auto& c : registry())
        if (c.name == name) return &c;
    return nullptr;
}

std::optional<Module> generate(const BenchmarkCase& c, Diagnostics& diags) {
    std::string text;
    if (c.kind == "vecmul") {
        if (c.params.n < 1) {
            diags.error("bench-shape", {}, "vecmul size must be positive");
            return std::nullopt;
        }
        text = emit_vecmul(c.params.n, c.params.unrolled);
    } else if (c.kind == "dense") {
        if (c.params.n < 1) {
            diags.error("bench-shape", {}, "dense size must be positive");
            return std::nullopt;
        }
        text = emit_dense(c.params.n);
    } else if (c.kind == "softmax") {
        if (c.params.n < 2) {
            diags.error("bench-shape", {}, "softmax size must be at least 2");
            return std::nullopt;
        }
        text = emit_softmax(c.params.n, c.params.unrolled);
    } else if (c.kind == "conv2d") {
        if (c.params.h < 1 || c.params.w < 1 || c.params.channels < 1) {
            diags.error("bench-shape", {}, "conv2d shape must be positive");
            return std::nullopt;
        }
        text = emit_conv2d(c.params.h, c.params.w, c.params.channels,
                           c.params.unrolled);
    } else if (c.kind == "maxp") {
        if (c.params.h < 2 || c.params.w < 2 || c.params.h % 2 ||
            c.params.w % 2) {
            diags.error("bench-shape", {}, "maxp shape must be even and positive");
            return std::nullopt;
        }
        text = emit_maxp(c.params.h, c.params.w, c.params.unrolled);
    } else if (c.kind == "thxprlsg") {
        if (c.params.n < 1) {
            diags.error("bench-shape", {}, "thxprlsg size must be positive");
            return std::nullopt;
        }
        text = emit_thxprlsg(c.params.n);
    } else if (c.kind == "mnist_mlp") {
        text = emit_mnist();
    } else {
        diags.error("bench-shape", {}, "unknown benchmark kind '" + c.kind + "'");
        return std::nullopt;
    }
    return parse_module(text, diags);
}

std::vector<int64_t> input_sizes(const BenchmarkCase& c) {
    const auto& p = c.params;
    if (c.kind == "vecmul") return {p.n, p.n};
    if (c.kind == "dense") return {p.n, p.n * p.n, p.n};
    if (c.kind == "softmax") return {p.n};
    if (c.kind == "conv2d") return {p.h * p.w, p.channels * 9};
    if (c.kind == "maxp") return {p.h * p.w};
    if (c.kind == "thxprlsg") return {p.n};
    if (c.kind == "mnist_mlp") return {784, 784 * 10, 10};
    return {};
}

int64_t output_size(const BenchmarkCase& c) {
    const auto& p = c.params;
    if (c.kind == "vecmul" || c.kind == "dense" || c.kind == "softmax" ||
        c.kind == "thxprlsg")
        return p.n;
    if (c.kind == "conv2d") return p.channels * p.h * p.w;
    if (c.kind == "maxp") return (p.h / 2) * (p.w / 2);
    if (c.kind == "mnist_mlp") return 10;
    return 0;
}

std::vector<float> golden_run(const BenchmarkCase& c,
                              const std::vector<std::vector<float>>& inputs) {
    auto sizes = input_sizes(c);
    if (inputs.size() != sizes.size())
        throw std::invalid_argument("golden_run: input count mismatch for " +
                                    c.name);
    for (size_t i = 0; i < sizes.size(); i++)
        if (inputs[i].size() != static_cast<size_t>(sizes[i]))
            throw std::invalid_argument("golden_run: input size mismatch for " +
                                        c.name);
    const auto& p = c.params;
    if (c.kind == "vecmul") return golden_vecmul(p.n, inputs[0], inputs[1]);
    if (c.kind == "dense")
        return golden_dense(p.n, inputs[0], inputs[1], inputs[2], true);
    if (c.kind == "softmax") return golden_softmax(inputs[0]);
    if (c.kind == "conv2d")
        return golden_conv2d(p.h, p.w, p.channels, inputs[0], inputs[1]);
    if (c.kind == "maxp") return golden_maxp(p.h, p.w, inputs[0]);
    if (c.kind == "thxprlsg") return golden_thxprlsg(inputs[0]);
    if (c.kind == "mnist_mlp")
        return golden_mnist(inputs[0], inputs[1], inputs[2]);
    throw std::invalid_argument("golden_run: unknown kind " + c.kind);
}

std::vector<std::vector<float>> random_inputs(const BenchmarkCase& c,
                                              uint32_t seed, int image) {
    float scale = 1.0f;
    if (softmax_bearing(c) && image % 2 == 1) scale = 20.0f;
    uint32_t mix = fnv1a(c.name) ^ (seed * 2654435761u) ^
                   (static_cast<uint32_t>(image) * 40503u + 0x9e3779b9u);
    std::mt19937 rng(mix);
    std::vector<std::vector<float>> out;
    for (int64_t sz : input_sizes(c)) {
        std::vector<float> v(static_cast<size_t>(sz));
        for (auto& x : v) {
            // 24 uniform bits -> [0,1) -> [-scale, scale)
            float u = static_cast<float>(rng() >> 8) * (1.0f / 16777216.0f);
            x = scale * (2.0f * u - 1.0f);
        }
        out.push_back(std::move(v));
    }
    return out;
}

CaseResult run_case(const BenchmarkCase& c, const SuiteOptions& opt) {
    CaseResult res;
    res.name = c.name;
    Diagnostics diags;
    auto parsed = generate(c, diags);
    if (!parsed || diags.has_errors()) {
        res.detail = "generate: " + diags.to_string();
        return res;
    }
    Diagnostics pipe_diags;
    auto transformed = run_pipeline(*parsed, opt.pass_config, pipe_diags);
    if (!transformed || pipe_diags.has_errors()) {
        res.detail = "pipeline: " + pipe_diags.to_string();
        return res;
    }
    Module m = std::move(*transformed);
    if (opt.post_pipeline_hook) opt.post_pipeline_hook(c.name, m);

    // Partition the requested arrays; specs naming arrays this case does
    // not have are skipped so one spec set can serve the whole suite.
    std::map<std::string, BankLayout> layouts;
    for (const PartitionSpec& spec : opt.partitions) {
        const Global* g = m.find_global(spec.array);
        if (!g) continue;
        Diagnostics pd;
        auto layout = compute_layout(g->type, spec, pd);
        if (!layout || !apply_partition(m, spec, pd)) {
            res.detail = "partition " + spec.array + ": " + pd.to_string();
            return res;
        }
        layouts.emplace(spec.array, *layout);
    }

    ScheduleResult sched = schedule_module(m, opt.resources);
    Diagnostics legality = check_schedule(m, sched, opt.resources);
    if (legality.has_errors()) {
        res.detail = "schedule: " + legality.to_string();
        return res;
    }

    auto sizes = input_sizes(c);
    bool all_ok = true;
    for (int image = 0; image < opt.images; image++) {
        auto inputs = random_inputs(c, opt.seed, image);
        MemoryImage img = MemoryImage::for_module(m);
        for (size_t k = 0; k < sizes.size(); k++) {
            std::string bank = "arg" + std::to_string(k);
            std::vector<Word> words;
            words.reserve(inputs[k].size());
            for (float v : inputs[k]) words.push_back(Word::f32(v));
            auto lit = layouts.find(bank);
            if (lit != layouts.end()) {
                img.banks[bank] = std::move(words);
                if (!slice_bank(img, lit->second)) {
                    res.detail = "image: cannot slice " + bank;
                    return res;
                }
            } else if (std::vector<Word>* dst = img.find(bank)) {
                if (dst->size() != words.size()) {
                    res.detail = "image: bank " + bank + " shape mismatch";
                    return res;
                }
                *dst = std::move(words);
            } else {
                res.detail = "image: missing bank " + bank;
                return res;
            }
        }

        Diagnostics run_diags;
        auto rr = run(m, img, run_diags);
        if (!rr) {
            res.detail = "run: " + run_diags.to_string();
            return res;
        }
        MemoryImage got_full = rr->image;
        auto rit = layouts.find("ret0");
        if (rit != layouts.end() && !unslice_bank(got_full, rit->second)) {
            res.detail = "image: cannot reassemble ret0";
            return res;
        }
        MemoryImage want;
        auto golden = golden_run(c, inputs);
        std::vector<Word> wv;
        wv.reserve(golden.size());
        for (float v : golden) wv.push_back(Word::f32(v));
        want.banks["ret0"] = std::move(wv);

        CompareReport rep = compare_images(got_full.subset({"ret0"}), want,
                                           opt.rel_tol, opt.abs_tol);
        res.worst_rel_err = std::max(res.worst_rel_err, rep.worst_rel_err);
        if (!rep.pass) {
            all_ok = false;
            if (res.detail.empty())
                res.detail = "image " + std::to_string(image) + ": " +
                             rep.to_string();
        }

        if (image == 0) {
            Diagnostics cd;
            auto cycles = count_cycles(m, opt.resources, img, cd);
            if (!cycles) {
                res.detail = "cycles: " + cd.to_string();
                return res;
            }
            res.cycles = *cycles;
        }
    }
    res.pass = all_ok;
    return res;
}

std::vector<CaseResult> run_suite(const SuiteOptions& opt) {
    std::vector<CaseResult> out;
    for (const auto& c : registry()) out.push_back(run_case(c, opt));
    return out;
}

std::string render_report(const std::vector<CaseResult>& results) {
    std::ostringstream os;
    for (const auto& r : results) {
        char err[32];
        std::snprintf(err, sizeof err, "%.3e", r.worst_rel_err);
        os << "case=" << r.name << " status=" << (r.pass ? "pass" : "fail")
           << " worst_rel_err=" << err << " cycles=" << r.cycles << "\n";
    }
    return os.str();
}

}  // namespace lf::bench
