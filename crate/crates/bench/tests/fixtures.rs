use bola_ssim::bola::Version;
use bola_ssim::sim::simulate;
use bola_ssim_bench::fixture;

#[test]
fn fixtures_simulate() {
    for version in [Version::V1, Version::V2] {
        let f = fixture(version, 50, 1);
        assert_eq!(f.ladders.len(), 50);
        let report = simulate(&f.session, &f.ladders, &f.trace).unwrap();
        assert_eq!(report.records.len(), 50);
    }
}
