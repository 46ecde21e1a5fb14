class CertError(Exception):
    pass

class ParseError(CertError):
    def __init__(self, message, line=0, column=0, expected=None, filename='<input>'):
        super().__init__(message)
        self.line = line
        self.column = column
        self.expected = sorted(expected or [])
        self.filename = filename

    def __str__(self):
        s = f'{self.filename}:{self.line}:{self.column}: {self.args[0]}'
        if self.expected:
            s += f' (expected one of: {", ".join(self.expected)})'
        return s

    def as_dict(self):
        return {
            'error': 'ParseError',
            'file': self.filename,
            'line': self.line,
            'column': self.column,
            'message': self.args[0],
            'expected': self.expected
        }

class CertTypeError(CertError):
    def __init__(self, kind, location, expected=None, found=None, detail=None):
        self.kind = kind
        self.location = location
        self.expected = expected
        self.found = found
        self.detail = detail
        super().__init__(self.render())

    def render(self):
        filename, line, column = self.location
        s = f'{filename}:{line}:{column}: {self.kind}'
        if self.expected is not None or self.found is not None:
            s += f': expected {self.expected or "?"}, found {self.found or "?"}'
        if self.detail:
            s += f' ({self.detail})'
        return s

    def as_dict(self):
        filename, line, column = self.location
        return {
            'error': 'TypeError',
            'kind': self.kind,
            'file': filename,
            'line': line,
            'column': column,
            'expected': None if self.expected is None else str(self.expected),
            'found': None if self.found is None else str(self.found),
            'detail': self.detail
        }

class EvaluationError(CertError):
    pass

class StuckTerm(EvaluationError):
    pass

class CertArithmeticError(EvaluationError, ArithmeticError):
    pass

class ContinuousUnsupported(EvaluationError):
    pass

class FuelError(EvaluationError):
    pass

class NoMatch(CertError):
    pass

class TypeRegression(CertError):
    pass

class CorpusError(CertError):
    pass

class UsageError(CertError):
    pass
