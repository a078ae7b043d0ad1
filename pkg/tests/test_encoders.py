"""Tests for the residual backbones, first-layer adaptation and both encoders."""

from __future__ import annotations

import pytest
import torch
from torch import nn

from avtrace._errors import ConfigError
from avtrace.config import EncoderConfig
from avtrace.encoders import (
    BACKBONES,
    AudioEncoder,
    SmallResNet,
    VisualEncoder,
    adapt_conv,
    adapt_first_layer,
    count_parameters,
    pool_visual,
    to_single_channel,
)

SMALL = EncoderConfig(embed_dim=16, attention_heads=2, backbone_width=4)


@pytest.fixture
def visual() -> VisualEncoder:
    torch.manual_seed(0)
    return VisualEncoder(SMALL, frames_per_clip=3).eval()


@pytest.fixture
def audio() -> AudioEncoder:
    torch.manual_seed(0)
    return AudioEncoder(SMALL).eval()


# ---------------------------------------------------------------------------
# Backbones and registry
# ---------------------------------------------------------------------------
class TestBackbones:
    def test_small_resnet_features(self) -> None:
        net = SmallResNet(width=4)
        assert net.feature_width == 32
        assert tuple(net(torch.rand(2, 3, 16, 16)).shape) == (2, 32)

    def test_registry_names(self) -> None:
        assert BACKBONES.names() == ["resnet18", "resnet50", "small_resnet"]

    def test_resnet50_width(self) -> None:
        net, width = BACKBONES.build("resnet50", width=16, pretrained=False)
        assert width == 2048
        assert isinstance(net.fc, nn.Identity)

    def test_unknown_tag(self) -> None:
        with pytest.raises(ConfigError, match="not found"):
            BACKBONES.build("vgg", width=4, pretrained=False)

    def test_dotted_path_resolves(self) -> None:
        """A dotted tag is imported as a factory."""
        net, width = BACKBONES.build("avtrace.encoders.backbones.small_resnet", width=4, pretrained=False)
        assert isinstance(net, SmallResNet)
        assert width == 32

    def test_unimportable_path(self) -> None:
        with pytest.raises(ConfigError, match="cannot import"):
            BACKBONES.get("avtrace.no_such_module.factory")

    def test_duplicate_registration(self) -> None:
        """Registering a tag twice is an error."""
        with pytest.raises(ValueError, match="already registered"):
            BACKBONES.register("small_resnet", SmallResNet)

    def test_count_parameters(self) -> None:
        assert count_parameters(nn.Linear(3, 2)) == 8


# ---------------------------------------------------------------------------
# RGB -> single-channel adaptation
# ---------------------------------------------------------------------------
class TestFirstLayerAdaptation:
    def test_channel_mean(self) -> None:
        """The adapted kernel is the mean over the RGB input channels."""
        w = torch.tensor([1.0, 2.0, 3.0]).view(1, 3, 1, 1)
        assert adapt_first_layer(w).tolist() == [[[[2.0]]]]

    def test_kernel_shape_kept(self) -> None:
        w = torch.randn(64, 3, 7, 7)
        adapted = adapt_first_layer(w)
        assert tuple(adapted.shape) == (64, 1, 7, 7)
        assert torch.allclose(adapted[:, 0], w.mean(dim=1))

    def test_wrong_channel_count(self) -> None:
        with pytest.raises(ValueError, match="out, 3, k, k"):
            adapt_first_layer(torch.randn(8, 1, 3, 3))

    def test_grey_input_is_a_third_of_replicated_rgb(self) -> None:
        """adapted(x) equals original([x, x, x]) / 3."""
        torch.manual_seed(1)
        conv = nn.Conv2d(3, 5, kernel_size=3, padding=1, bias=False)
        adapted = adapt_conv(conv)
        x = torch.randn(2, 1, 8, 8)
        with torch.no_grad():
            expected = conv(x.repeat(1, 3, 1, 1)) / 3
            assert torch.allclose(adapted(x), expected, atol=1e-6)

    def test_to_single_channel_top_level(self) -> None:
        net = to_single_channel(SmallResNet(width=4))
        assert net.conv1.in_channels == 1
        assert tuple(net(torch.rand(2, 1, 16, 16)).shape) == (2, 32)

    def test_to_single_channel_nested(self) -> None:
        """The first convolution is found inside nested containers."""
        net = nn.Sequential(nn.Sequential(nn.Conv2d(3, 4, 3)), nn.ReLU(), nn.Conv2d(4, 4, 3))
        to_single_channel(net)
        assert net[0][0].in_channels == 1
        assert net[2].in_channels == 4

    def test_to_single_channel_requires_conv(self) -> None:
        with pytest.raises(ValueError, match="no convolution"):
            to_single_channel(nn.Sequential(nn.Linear(3, 3)))


# ---------------------------------------------------------------------------
# Visual encoder
# ---------------------------------------------------------------------------
class TestVisualEncoder:
    def test_output_shape(self, visual: VisualEncoder) -> None:
        with torch.no_grad():
            assert tuple(visual(torch.rand(2, 3, 3, 16, 16)).shape) == (2, 16)
            assert tuple(visual(torch.rand(3, 3, 16, 16)).shape) == (1, 16)

    def test_wrong_frame_count(self, visual: VisualEncoder) -> None:
        with pytest.raises(ValueError, match="expected frames"):
            visual(torch.rand(2, 2, 3, 16, 16))

    def test_frames_encoded_independently(self, visual: VisualEncoder) -> None:
        """Changing one frame changes only that frame's feature."""
        frames = torch.rand(1, 3, 3, 16, 16)
        changed = frames.clone()
        changed[:, 1] = torch.rand(3, 16, 16)
        with torch.no_grad():
            a = visual.encode_frames(frames)
            b = visual.encode_frames(changed)
        assert torch.allclose(a[:, 0], b[:, 0], atol=1e-6)
        assert torch.allclose(a[:, 2], b[:, 2], atol=1e-6)
        assert not torch.allclose(a[:, 1], b[:, 1])

    def test_frame_features_non_negative(self, visual: VisualEncoder) -> None:
        """Projected frame features pass through a ReLU."""
        with torch.no_grad():
            assert bool((visual.encode_frames(torch.rand(2, 3, 3, 16, 16)) >= 0).all())

    def test_zero_attention_is_layer_norm(self, visual: VisualEncoder) -> None:
        """With zero attention output the block reduces to LayerNorm(h)."""
        with torch.no_grad():
            for p in visual.attention.parameters():
                p.zero_()
            h = torch.randn(2, 3, 16)
            expected = nn.functional.layer_norm(h, (16,), eps=1e-5)
            assert torch.allclose(visual.temporal_attend(h), expected, atol=1e-5)

    def test_single_frame(self) -> None:
        torch.manual_seed(0)
        encoder = VisualEncoder(SMALL, frames_per_clip=1).eval()
        with torch.no_grad():
            out = encoder(torch.rand(2, 1, 3, 16, 16))
        assert tuple(out.shape) == (2, 16)
        assert bool(torch.isfinite(out).all())

    def test_attention_is_permutation_equivariant(self, visual: VisualEncoder) -> None:
        """Permuting frames permutes the attended sequence."""
        h = torch.randn(2, 3, 16)
        perm = torch.tensor([2, 0, 1])
        with torch.no_grad():
            assert torch.allclose(visual.temporal_attend(h[:, perm]), visual.temporal_attend(h)[:, perm], atol=1e-5)

    def test_pooled_output_ignores_frame_order(self, visual: VisualEncoder) -> None:
        """Without positional encoding z_v is order invariant."""
        frames = torch.rand(2, 3, 3, 16, 16)
        perm = torch.tensor([1, 2, 0])
        with torch.no_grad():
            assert torch.allclose(visual(frames[:, perm]), visual(frames), atol=1e-5)

    def test_positional_embedding_breaks_order_invariance(self) -> None:
        torch.manual_seed(0)
        config = SMALL.model_copy(update={"positional_encoding": True})
        encoder = VisualEncoder(config, frames_per_clip=3).eval()
        with torch.no_grad():
            encoder.positional.normal_()  # type: ignore[union-attr]
            frames = torch.rand(1, 3, 3, 16, 16)
            shuffled = frames[:, torch.tensor([1, 2, 0])]
            assert not torch.allclose(encoder(shuffled), encoder(frames), atol=1e-5)

    def test_pool_visual(self) -> None:
        attended = torch.tensor([[[1.0, 2.0], [3.0, 4.0]]])
        assert pool_visual(attended).tolist() == [[2.0, 3.0]]
        assert pool_visual(torch.tensor([[5.0, 7.0]])).tolist() == [5.0, 7.0]


# ---------------------------------------------------------------------------
# Audio encoder
# ---------------------------------------------------------------------------
class TestAudioEncoder:
    def test_output_shape(self, audio: AudioEncoder) -> None:
        with torch.no_grad():
            assert tuple(audio(torch.rand(2, 1, 128, 128)).shape) == (2, 16)
            assert tuple(audio(torch.rand(1, 128, 128)).shape) == (1, 16)

    def test_first_layer_single_channel(self, audio: AudioEncoder) -> None:
        assert audio.backbone.conv1.in_channels == 1

    def test_deterministic_in_eval(self, audio: AudioEncoder) -> None:
        mel = torch.rand(2, 1, 128, 128) * 2 - 1
        with torch.no_grad():
            assert torch.equal(audio(mel), audio(mel))

    def test_silence_is_finite(self, audio: AudioEncoder) -> None:
        """The silent spectrogram encodes to a finite vector."""
        with torch.no_grad():
            out = audio(torch.full((1, 1, 128, 128), -1.0))
        assert bool(torch.isfinite(out).all())

    def test_wrong_shape(self, audio: AudioEncoder) -> None:
        with pytest.raises(ValueError, match="expected mel"):
            audio(torch.rand(2, 1, 64, 64))

    def test_full_scale_audio_branch(self) -> None:
        """The large audio backbone yields a D-dimensional embedding."""
        config = EncoderConfig(embed_dim=512, attention_heads=8, audio_backbone="resnet18")
        encoder = AudioEncoder(config).eval()
        assert encoder.feature_width == 512
        with torch.no_grad():
            assert tuple(encoder(torch.rand(1, 1, 128, 128)).shape) == (1, 512)
