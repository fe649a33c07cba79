import io
import json
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image as PILImage

from inpaintkit import codec
from inpaintkit.backends import prompt_colour
from inpaintkit.cli import main

from scenes import square_on_field


def write_scene(tmp_path, name="scene.png"):
    scene = square_on_field()
    path = tmp_path / name
    path.write_bytes(codec.encode_image_png(scene.image))
    return path, scene


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


class TestRunCommand:
    def test_fill_without_prompt_exits_2(self, tmp_path, capsys):
        path, _ = write_scene(tmp_path)
        code = run_cli("run", "--input", path, "--mode", "fill", "--point", "64,60")
        assert code == 2
        assert "requires --prompt" in capsys.readouterr().err

    def test_no_point_and_no_mask_exits_2(self, tmp_path):
        path, _ = write_scene(tmp_path)
        assert run_cli("run", "--input", path, "--mode", "remove") == 2

    def test_remove_writes_output_with_outside_identity(self, tmp_path):
        path, scene = write_scene(tmp_path)
        out = tmp_path / "out.png"
        mask_out = tmp_path / "mask.png"
        code = run_cli(
            "run",
            "--input", path,
            "--mode", "remove",
            "--point", "64,60",
            "--output", out,
            "--mask-out", mask_out,
        )
        assert code == 0
        # Verified through the compare subcommand, outside the edit mask.
        assert run_cli("compare", "--a", path, "--b", out, "--mask", mask_out, "--region", "outside") == 0

    def test_mask_in_with_wrong_dims_exits_3(self, tmp_path, capsys):
        path, _ = write_scene(tmp_path)
        bad = np.zeros((10, 10), np.uint8)
        buf = io.BytesIO()
        PILImage.fromarray(bad, mode="L").save(buf, format="PNG")
        bad_path = tmp_path / "bad_mask.png"
        bad_path.write_bytes(buf.getvalue())
        code = run_cli(
            "run", "--input", path, "--mode", "remove", "--mask-in", bad_path
        )
        assert code == 3
        assert "BadMask" in capsys.readouterr().err

    def test_missing_input_file_exits_3(self, tmp_path, capsys):
        code = run_cli(
            "run", "--input", tmp_path / "nope.png", "--mode", "remove", "--point", "1,1"
        )
        assert code == 3
        assert "DecodeError" in capsys.readouterr().err

    def test_unknown_flag_exits_2(self, tmp_path):
        path, _ = write_scene(tmp_path)
        with pytest.raises(SystemExit) as excinfo:
            run_cli("run", "--input", path, "--mode", "remove", "--point", "1,1", "--frobnicate")
        assert excinfo.value.code == 2

    def test_out_of_bounds_point_exits_3(self, tmp_path, capsys):
        path, _ = write_scene(tmp_path)
        code = run_cli("run", "--input", path, "--mode", "remove", "--point", "999,999")
        assert code == 3
        assert "PointOutOfBounds" in capsys.readouterr().err

    def test_json_report_schema(self, tmp_path, capsys):
        path, _ = write_scene(tmp_path)
        out = tmp_path / "out.png"
        code = run_cli(
            "run",
            "--input", path,
            "--mode", "fill",
            "--point", "64,60",
            "--prompt", "a teddy bear on a bench",
            "--seed", "7",
            "--output", out,
            "--json",
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert set(report) == {
            "mode",
            "input",
            "output",
            "mask_out",
            "seed",
            "config",
            "object_area",
            "mask_area",
            "window",
            "timings_ms",
        }
        assert report["mode"] == "fill"
        assert report["seed"] == 7
        assert report["config"]["dilate_radius_fill_min"] == 35
        assert report["mask_area"] >= report["object_area"] > 0
        assert set(report["window"]) == {
            "x0", "y0", "side_w", "side_h", "working_w", "working_h", "scale",
        }

    def test_json_report_to_file(self, tmp_path):
        path, _ = write_scene(tmp_path)
        report_path = tmp_path / "report.json"
        code = run_cli(
            "run",
            "--input", path,
            "--mode", "remove",
            "--point", "64,60",
            "--output", tmp_path / "o.png",
            "--json", report_path,
        )
        assert code == 0
        assert json.loads(report_path.read_text())["mode"] == "remove"

    def test_fill_output_uses_prompt_hash_colour(self, tmp_path):
        path, scene = write_scene(tmp_path)
        out = tmp_path / "filled.png"
        mask_out = tmp_path / "mask.png"
        code = run_cli(
            "run",
            "--input", path,
            "--mode", "fill",
            "--point", "64,60",
            "--prompt", "a teddy bear on a bench",
            "--seed", "7",
            "--output", out,
            "--mask-out", mask_out,
        )
        assert code == 0
        filled = codec.decode_image(out.read_bytes())
        edit = codec.decode_mask(mask_out.read_bytes())
        colour = np.array(prompt_colour("a teddy bear on a bench", 7), np.uint8)
        assert (filled.pixels[edit.bits] == colour).all()

    def test_dilate_radius_override_remove(self, tmp_path):
        path, _ = write_scene(tmp_path)
        mask_out = tmp_path / "m.png"
        code = run_cli(
            "run",
            "--input", path,
            "--mode", "remove",
            "--point", "64,60",
            "--dilate-radius", "0",
            "--output", tmp_path / "o.png",
            "--mask-out", mask_out,
        )
        assert code == 0
        edit = codec.decode_mask(mask_out.read_bytes())
        assert edit.area == 400  # no dilation: exactly the 20x20 square


class TestCompareCommand:
    def test_identical_files_exit_0(self, tmp_path):
        path, scene = write_scene(tmp_path)
        mask = tmp_path / "mask.png"
        from inpaintkit.model import Mask

        mask.write_bytes(codec.encode_mask_png(Mask(scene.object_bits)))
        assert run_cli("compare", "--a", path, "--b", path, "--mask", mask, "--region", "inside") == 0
        assert run_cli("compare", "--a", path, "--b", path, "--mask", mask, "--region", "outside") == 0

    def test_single_planted_pixel_detected_with_coordinates(self, tmp_path, capsys):
        path, scene = write_scene(tmp_path)
        tampered = np.array(scene.image.pixels, copy=True)
        tampered[60, 64] ^= 0x40  # one pixel inside the object
        b_path = tmp_path / "b.png"
        buf = io.BytesIO()
        PILImage.fromarray(tampered).save(buf, format="PNG")
        b_path.write_bytes(buf.getvalue())

        from inpaintkit.model import Mask

        mask_path = tmp_path / "mask.png"
        mask_path.write_bytes(codec.encode_mask_png(Mask(scene.object_bits)))

        code = run_cli("compare", "--a", path, "--b", b_path, "--mask", mask_path, "--region", "inside")
        assert code == 1
        assert "(64, 60)" in capsys.readouterr().out
        # The same pixel is invisible to an outside-region compare.
        assert run_cli("compare", "--a", path, "--b", b_path, "--mask", mask_path, "--region", "outside") == 0

    def test_dimension_mismatch_exits_2(self, tmp_path):
        path, scene = write_scene(tmp_path)
        small = tmp_path / "small.png"
        buf = io.BytesIO()
        PILImage.fromarray(np.zeros((10, 10, 3), np.uint8)).save(buf, format="PNG")
        small.write_bytes(buf.getvalue())
        from inpaintkit.model import Mask

        mask_path = tmp_path / "mask.png"
        mask_path.write_bytes(codec.encode_mask_png(Mask(scene.object_bits)))
        assert run_cli("compare", "--a", path, "--b", small, "--mask", mask_path, "--region", "inside") == 2


class TestSubprocessEntry:
    def test_module_invocation_matches_in_process(self, tmp_path):
        path, _ = write_scene(tmp_path)
        out = tmp_path / "sub.png"
        proc = subprocess.run(
            [
                sys.executable, "-m", "inpaintkit", "run",
                "--input", str(path),
                "--mode", "remove",
                "--point", "64,60",
                "--output", str(out),
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        in_proc = tmp_path / "inproc.png"
        assert run_cli(
            "run", "--input", path, "--mode", "remove", "--point", "64,60",
            "--output", in_proc,
        ) == 0
        a = codec.decode_image(out.read_bytes())
        b = codec.decode_image(in_proc.read_bytes())
        assert np.array_equal(a.pixels, b.pixels)
