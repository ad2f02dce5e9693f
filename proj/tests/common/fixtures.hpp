#pragma once

// Shared textual IR fixtures. Names describe content, not provenance.

namespace lf::fixtures {

// Entry in the three-role calling convention: two floats are loaded from a
// [2 x float] input reached through the params slot table; the temps slot is
// read but never used.
inline const char* kTwoFloatParamsModule = R"(
define void @main(i8** %params, i8** %temps, i8** %retval) {
  %0 = bitcast i8** %params to [2 x float]**
  %arg0 = load [2 x float]** %0, align 8
  %1 = load i8** %temps, align 8
  %2 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 0
  %3 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 1
  %4 = load float* %2, align 8
  %5 = load float* %3, align 8
  ret void
}
)";

// The standalone form of the same program: the input lives in a global and
// the two loads are volatile.
inline const char* kTwoFloatStandaloneModule = R"(
@arg0 = global [2 x float] zeroinitializer, align 8
define void @main() {
  %0 = getelementptr inbounds [2 x float]* @arg0, i64 0, i64 0
  %1 = getelementptr inbounds [2 x float]* @arg0, i64 0, i64 1
  %2 = load volatile float* %0, align 8
  %3 = load volatile float* %1, align 8
  ret void
}
)";

// A rolled elementwise multiply over 8-element arrays, standalone form.
inline const char* kVecmul8StandaloneModule = R"(
@a = global [8 x float] zeroinitializer, align 8
@b = global [8 x float] zeroinitializer, align 8
@out = global [8 x float] zeroinitializer, align 8

define void @main() {
  br label %loop

loop:
  %i = phi i64 [ 0, %entry ], [ %next, %loop ]
  %pa = getelementptr inbounds [8 x float]* @a, i64 0, i64 %i
  %pb = getelementptr inbounds [8 x float]* @b, i64 0, i64 %i
  %po = getelementptr inbounds [8 x float]* @out, i64 0, i64 %i
  %va = load volatile float* %pa, align 4
  %vb = load volatile float* %pb, align 4
  %prod = fmul float %va, %vb
  store volatile float %prod, float* %po, align 4
  %next = add i64 %i, 1
  %done = icmp eq i64 %next, 8
  br i1 %done, label %exit, label %loop

exit:
  ret void
}
)";

}  // namespace lf::fixtures
