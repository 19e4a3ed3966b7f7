import pytest

from cpilab.config import parse_config, parse_config_string, read_sections, shipped_config
from cpilab.errors import ConfigError, MaterialError
from cpilab.optics import VACUUM, group_delay
from cpilab.units import delay_to_stage, omega_to_wavelength

from conftest import shipped

MINIMAL = """
[chirp]
sfg_centre_nm = 395.9
"""


def test_lab_dip_config_matches_lab_setup():
    s = shipped("lab_dip.cfg").setup
    assert s.laser.centre_nm == 790.0
    assert s.chirped.bandwidth_nm == 10.0 and s.antichirped.bandwidth_nm == 9.0
    assert s.chirped.duration(790.0) == pytest.approx(51200.0, rel=1e-3)
    assert s.antichirped.duration(790.0) == pytest.approx(45000.0, rel=1e-3)
    assert s.filter.fwhm_nm == 0.4 and s.filter.centre_nm == pytest.approx(395.9)
    assert omega_to_wavelength(s.effective_centre) == pytest.approx(791.8, abs=1e-9)
    assert not s.sample
    assert s.detector.background_fraction == 0.03


def test_calcite_bk7_sample_and_auto_centre():
    cfg = shipped("calcite_bk7.cfg")
    names = [(m.name, L) for m, L in cfg.setup.sample.layers]
    assert names == [("calcite", 80.60), ("bk7", 28.93)]
    assert cfg.setup.sfg_acceptance_nm == 4.6
    dip = delay_to_stage(group_delay(cfg.setup.sample, cfg.setup.effective_centre))
    wli = delay_to_stage(group_delay(cfg.setup.sample, cfg.setup.omega0))
    assert cfg.dip_scan.positions.mean() == pytest.approx(dip, abs=1e-6)
    assert cfg.wli_scan.positions.mean() == pytest.approx(wli, abs=0.05)


def test_loss_sweep_config():
    assert shipped("loss_sweep.cfg").sweep_transmissions == (1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01)


def test_empty_sample_is_vacuum():
    cfg = parse_config_string(MINIMAL + "[sample]\nlayers_mm =\n")
    assert cfg.setup.sample is VACUUM
    assert cfg.dip_scan.positions.mean() == pytest.approx(0.0, abs=1e-9)


def test_defaults():
    cfg = parse_config_string(MINIMAL)
    assert cfg.setup.sample_transmission == 1.0
    assert cfg.wli_scan.step_um == pytest.approx(0.790 / 20)
    assert cfg.dip_scan.step_um == 1.0


@pytest.mark.parametrize("text, match", [
    ("[loss]\ntransmission = 1.5\n", "transmission"),
    ("[loss]\ntransmission = -0.1\n", "transmission"),
    ("[laser]\ncentre_wavelenght_nm = 790\n", "unknown key"),
    ("[lasers]\ncentre_wavelength_nm = 790\n", "unknown section"),
    ("[laser]\ncentre_wavelength_nm = seven\n", "cannot parse"),
    ("[laser]\ncentre_wavelength_nm = nan\n", "cannot parse"),
    ("[filter]\nfwhm_nm = 0\n", "positive"),
    ("[scan]\nwli_step_um = 0.06\n", "lambda/16"),
    ("[detector]\nbackground = -1\n", "background"),
    ("[loss]\nsweep_transmissions = 1.0, 0.0\n", "sweep"),
    ("no section header\n", "malformed"),
])
def test_invalid_configs(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config_string(text)


def test_unknown_material():
    with pytest.raises(MaterialError):
        parse_config_string(MINIMAL + "[sample]\nlayers_mm = unobtainium 3.0\n")


def test_bad_layer_syntax():
    with pytest.raises(ConfigError):
        parse_config_string(MINIMAL + "[sample]\nlayers_mm = bk7\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "absent.cfg")
    with pytest.raises(ConfigError):
        shipped_config("absent.cfg")


def test_materials_file_relative_to_config(tmp_path):
    (tmp_path / "glass.ini").write_text(
        "[slab]\nmodel = taylor\nreference_wavelength_nm = 790\nalpha_fs_per_mm = 100\n")
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text(MINIMAL + "[sample]\nlayers_mm = slab 2.0\nmaterials_file = glass.ini\n")
    cfg = parse_config(cfg_path)
    assert cfg.setup.sample.layers[0][0].name == "slab"
    assert cfg.dip_scan.positions.mean() == pytest.approx(delay_to_stage(200.0), abs=1e-6)


def test_materials_env_override(tmp_path, monkeypatch):
    (tmp_path / "m.ini").write_text("[only]\nmodel = taylor\nreference_wavelength_nm = 790\n")
    monkeypatch.setenv("CPILAB_MATERIALS", str(tmp_path / "m.ini"))
    assert parse_config_string(MINIMAL + "[sample]\nlayers_mm = only 1.0\n").setup.sample
    with pytest.raises(MaterialError):
        parse_config_string(MINIMAL + "[sample]\nlayers_mm = bk7 1.0\n")
    monkeypatch.setenv("CPILAB_MATERIALS", str(tmp_path / "missing.ini"))
    with pytest.raises(ConfigError):
        parse_config_string(MINIMAL + "[sample]\nlayers_mm = bk7 1.0\n")


def test_inline_comments_and_blank_values():
    sections = read_sections("[laser]\ncentre_wavelength_nm = 800  # nm\npulse_duration_fs =\n")
    assert sections == {"laser": {"centre_wavelength_nm": 800.0}}
