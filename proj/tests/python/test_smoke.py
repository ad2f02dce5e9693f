import pytest

import lfir

VECMUL = """@a = global [4 x float] zeroinitializer, align 4
@b = global [4 x float] zeroinitializer, align 4
@out = global [4 x float] zeroinitializer, align 4

define void @main() {
entry:
  br label %loop

loop:
  %i = phi i64 [ 0, %entry ], [ %inext, %loop ]
  %pa = getelementptr inbounds [4 x float]* @a, i64 0, i64 %i
  %pb = getelementptr inbounds [4 x float]* @b, i64 0, i64 %i
  %po = getelementptr inbounds [4 x float]* @out, i64 0, i64 %i
  %va = load volatile float* %pa, align 4
  %vb = load volatile float* %pb, align 4
  %prod = fmul float %va, %vb
  store volatile float %prod, float* %po, align 4
  %inext = add i64 %i, 1
  %done = icmp eq i64 %inext, 4
  br i1 %done, label %exit, label %loop

exit:
  ret void
}
"""

ROLE_FORM = """define void @main(i8** %params, i8** %temps, i8** %retval) {
  %0 = bitcast i8** %params to [2 x float]**
  %arg0 = load [2 x float]** %0, align 8
  %1 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 0
  %2 = getelementptr inbounds [2 x float]* %arg0, i64 0, i64 1
  %3 = load float* %1, align 8
  %4 = load float* %2, align 8
  ret void
}
"""


def test_check_clean_module():
    assert lfir.check(VECMUL) == []


def test_check_reports_errors():
    diags = lfir.check("define void @main( {")
    assert diags
    assert any("error" in line for line in diags)


def test_transform_restructures_role_form():
    out = lfir.transform(ROLE_FORM)
    assert "@arg0" in out
    assert "load volatile" in out
    assert "i8**" not in out


def test_transform_rejects_garbage():
    with pytest.raises(ValueError):
        lfir.transform("not ir at all")


def test_run_produces_products():
    out = lfir.run(VECMUL, inputs={"a": [1, 2, 3, 4], "b": [5, 6, 7, 8]})
    assert out["out"] == [5.0, 12.0, 21.0, 32.0]


def test_run_checks_input_shape():
    with pytest.raises(ValueError, match="bank holds"):
        lfir.run(VECMUL, inputs={"a": [1.0]})


def test_schedule_report_and_latency_knob():
    report = lfir.schedule(VECMUL)
    assert "cycles total=" in report
    base = lfir.cycle_count(VECMUL)
    slow = lfir.cycle_count(VECMUL, latencies={"load": 9})
    assert 0 < base < slow


def test_partition_creates_banks():
    out = lfir.partition(VECMUL, ["a:cyclic:factor=2"])
    assert "@a_p0" in out and "@a_p1" in out
    with pytest.raises(ValueError):
        lfir.partition(VECMUL, ["a:weird"])


def test_staged_equals_flagged_pipeline():
    specs = ["a:cyclic:factor=2", "b:block:factor=2"]
    cooked = lfir.transform(VECMUL, unroll_threshold=10000)
    staged = lfir.schedule(lfir.partition(cooked, specs))
    combined = lfir.schedule(cooked, partitions=specs)
    assert staged == combined


def test_bench_single_case():
    rows = lfir.bench(["vecmul_a"], images=2)
    assert len(rows) == 1
    row = rows[0]
    assert row["name"] == "vecmul_a"
    assert row["pass"] is True
    assert row["cycles"] > 0
    assert row["worst_rel_err"] <= 1e-5


def test_benchmark_registry():
    names = lfir.benchmarks()
    assert "vecmul_a" in names and "mnist_mlp" in names
    assert len(names) == 16


def test_mif_roundtrip():
    text = lfir.mif_encode([1, 2, 0xFFFFFFFF], width=32)
    width, words = lfir.mif_decode(text)
    assert width == 32
    assert words == [1, 2, 0xFFFFFFFF]
    with pytest.raises(ValueError):
        lfir.mif_encode([2], width=1)
