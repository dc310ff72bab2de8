# core/forms.py
from dataclasses import fields as dataclass_fields

from django import forms
from django.conf import settings

from .crouzeix_report import Tolerances
from .runner import COMMANDS, DEFAULT_A_GRID, FORMATS, RunConfig

MAX_DIMENSION = 12


def _split(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(',') if item.strip()]
    return list(value)


class ComplexListField(forms.Field):
    """Comma-separated numbers ('1.2,0.5+0.1j') or a JSON list of numbers / [re, im] pairs."""

    def to_python(self, value):
        if value in self.empty_values:
            return None
        items = []
        for item in _split(value):
            try:
                if isinstance(item, (list, tuple)):
                    re, im = item
                    items.append(complex(float(re), float(im)))
                else:
                    items.append(complex(item.replace(' ', '') if isinstance(item, str) else item))
            except (TypeError, ValueError):
                raise forms.ValidationError(f'{item!r} is not a number')
        return tuple(items)


class FloatListField(forms.Field):

    def to_python(self, value):
        if value in self.empty_values:
            return None
        try:
            return tuple(float(item) for item in _split(value))
        except (TypeError, ValueError):
            raise forms.ValidationError(f'{value!r} is not a list of numbers')


class ToleranceOverridesField(forms.Field):
    """NAME=VALUE strings (repeatable flag) or a mapping from a config file."""

    def to_python(self, value):
        if value in self.empty_values:
            return {}
        if isinstance(value, dict):
            pairs = list(value.items())
        else:
            pairs = []
            for item in ([value] if isinstance(value, str) else value):
                name, sep, number = str(item).partition('=')
                if not sep:
                    raise forms.ValidationError(f'tolerance override {item!r} is not NAME=VALUE')
                pairs.append((name.strip(), number.strip()))
        known = {f.name for f in dataclass_fields(Tolerances)}
        overrides = {}
        for name, number in pairs:
            if name not in known:
                raise forms.ValidationError(
                    f'unknown tolerance {name!r} (expected one of {", ".join(sorted(known))})')
            try:
                overrides[name] = float(number)
            except (TypeError, ValueError):
                raise forms.ValidationError(f'tolerance {name} must be a number, got {number!r}')
            if not overrides[name] > 0:
                raise forms.ValidationError(f'tolerance {name} must be positive')
        return overrides


class RunConfigForm(forms.Form):
    command = forms.ChoiceField(choices=[(c, c) for c in COMMANDS])
    weights = ComplexListField(required=False)
    matrix = ComplexListField(required=False)
    d = forms.IntegerField(required=False, min_value=2, max_value=MAX_DIMENSION)
    count = forms.IntegerField(required=False, min_value=1)
    grid = forms.IntegerField(required=False, min_value=2)
    a_grid = FloatListField(required=False)
    n = forms.IntegerField(required=False, min_value=256)
    seed = forms.IntegerField(required=False, min_value=0, max_value=2 ** 64 - 1)
    output = forms.CharField(required=False)
    format = forms.ChoiceField(choices=[(f, f) for f in FORMATS], required=False)
    tol = ToleranceOverridesField(required=False)

    def clean_n(self):
        n = self.cleaned_data.get('n')
        if n is not None and n & (n - 1):
            raise forms.ValidationError(f'grid size must be a power of two, got {n}')
        return n

    def clean_weights(self):
        weights = self.cleaned_data.get('weights')
        if weights is not None and not 2 <= len(weights) <= MAX_DIMENSION:
            raise forms.ValidationError(f'expected 2..{MAX_DIMENSION} weights, got {len(weights)}')
        return weights

    def clean_matrix(self):
        matrix = self.cleaned_data.get('matrix')
        if matrix is not None and len(matrix) != 4:
            raise forms.ValidationError('--matrix takes the 4 entries of a 2x2 matrix, row-major')
        return matrix

    def clean_a_grid(self):
        a_grid = self.cleaned_data.get('a_grid')
        if a_grid is not None and any(not a >= 0 for a in a_grid):
            raise forms.ValidationError('family parameters must be >= 0')
        return a_grid

    def clean(self):
        cleaned = super().clean()
        command = cleaned.get('command')
        weights, matrix = cleaned.get('weights'), cleaned.get('matrix')
        if command == 'psi' and (weights is None) == (matrix is None):
            raise forms.ValidationError('psi needs exactly one of --weights or --matrix')
        if command in ('boundary', 'map') and weights is None:
            raise forms.ValidationError(f'{command} needs --weights')
        if command == 'sweep' and (cleaned.get('d') is None or cleaned.get('count') is None):
            raise forms.ValidationError('sweep needs --d and --count')
        return cleaned

    def to_config(self):
        data = self.cleaned_data
        command = data['command']
        fmt = data.get('format') or ('json' if command == 'psi' or command == 'map' else 'csv')
        output = data.get('output') or settings.CROUZEIX_OUTPUT_DIR / f'{command}.{fmt}'
        return RunConfig(
            command=command,
            weights=data.get('weights'),
            matrix=data.get('matrix'),
            d=data.get('d'),
            count=data.get('count'),
            grid=data.get('grid') or 64,
            a_grid=data.get('a_grid') or DEFAULT_A_GRID,
            n=data.get('n') or settings.CROUZEIX_GRID_SIZE,
            seed=data['seed'] if data.get('seed') is not None else settings.CROUZEIX_SEED,
            tolerances=Tolerances.from_settings(**data.get('tol', {})),
            output=output,
            format=fmt,
        )
