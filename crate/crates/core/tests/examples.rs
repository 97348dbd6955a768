macro_rules! example_test {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example_test!(graph_io, graph_io_runs, "graph_io.rs");
example_test!(tensor_archive, tensor_archive_runs, "tensor_archive.rs");
example_test!(comp_graph_pruning, comp_graph_pruning_runs, "comp_graph_pruning.rs");
example_test!(sampler_plan, sampler_plan_runs, "sampler_plan.rs");
example_test!(explain_node, explain_node_runs, "explain_node.rs");
example_test!(fidelity, fidelity_runs, "fidelity.rs");
example_test!(confidence, confidence_runs, "confidence.rs");
example_test!(synth_fixtures, synth_fixtures_runs, "synth_fixtures.rs");
example_test!(dot_export, dot_export_runs, "dot_export.rs");
example_test!(bench_batching, bench_batching_runs, "bench_batching.rs");
example_test!(solver_crosscheck, solver_crosscheck_runs, "solver_crosscheck.rs");
