macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $name() {
            $name::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(vacuum_and_worked_point, "vacuum_and_worked_point.rs");
example!(photon_partial_trace, "photon_partial_trace.rs");
example!(oracle_vs_closed_form, "oracle_vs_closed_form.rs");
example!(permittivity_inversion, "permittivity_inversion.rs");
example!(epsilon_sweep, "epsilon_sweep.rs");
example!(near_field_regime, "near_field_regime.rs");
